#ifndef CPGEOM_CONFIG_HPP
#define CPGEOM_CONFIG_HPP

// Run configuration shared by every CLI command. A config file holds `key = value` lines
// plus an optional [hamiltonian] section; flags given on the command line win.

#include "hamiltonian.hpp"
#include "intersection.hpp"
#include "random_unitary.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cpgeom {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct RunConfig {
  std::string command;
  int n = 2;
  int n_max = 8;
  std::uint64_t seed = 0;
  int samples = 300;
  std::string model = "clifford";
  std::string pair = "clifford:clifford";
  std::string g = "random";  // random | file
  std::string g_file;
  int volume_grid = 64;
  int seed_table_grid = 64;
  int defect_grid = 20;
  int pairs = 5;
  int draws = 10000;
  std::string hamiltonian_file;
  std::string hamiltonian_text;  // resolved contents, embedded in reports
  double time = 0.3;
  double step = 1e-3;
  CountOptions count;
  double max_excluded = 0.02;
  double z_threshold = 3.0;
  unsigned threads = 0;
  std::string out = "out";
  std::string format = "text";  // text | csv | json
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(x)) {
    throw Error(ErrorKind::Parse, key + ": expected a real number, got '" + v + "'");
  }
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw Error(ErrorKind::Parse, key + ": expected an integer, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long x = 0;
  try {
    if (!v.empty() && v[0] != '-') x = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw Error(ErrorKind::Parse, key + ": expected an unsigned integer, got '" + v + "'");
  return x;
}

inline int parse_bounded(const std::string& key, const std::string& v, long long lo, long long hi) {
  const long long x = parse_int(key, v);
  if (x < lo || x > hi) {
    throw Error(ErrorKind::Parse, key + ": " + v + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

inline double parse_positive(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (!(x > 0.0)) throw Error(ErrorKind::Parse, key + ": must be positive");
  return x;
}

inline std::string parse_choice(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (v == a) return v;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
  throw Error(ErrorKind::Parse, key + ": expected " + list + ", got '" + v + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

using ConfigSetter = std::function<void(RunConfig&, const std::string&)>;

/// Every accepted key. Flags use the same names with '-' for '_'.
inline const std::map<std::string, ConfigSetter>& config_keys() {
  using namespace detail;
  static const std::map<std::string, ConfigSetter> keys = {
      {"command", [](RunConfig& c, const std::string& v) {
         c.command = parse_choice("command", v,
                                  {"constants", "volume", "intersect", "crofton", "sigma-check", "deform", "cho-check"});
       }},
      {"n", [](RunConfig& c, const std::string& v) { c.n = parse_bounded("n", v, 1, kMaxAmbient - 1); }},
      {"n_max", [](RunConfig& c, const std::string& v) { c.n_max = parse_bounded("n_max", v, 1, 64); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_u64("seed", v); }},
      {"samples", [](RunConfig& c, const std::string& v) { c.samples = parse_bounded("samples", v, 1, 100000000); }},
      {"model", [](RunConfig& c, const std::string& v) { c.model = parse_choice("model", v, {"clifford", "rp"}); }},
      {"pair", [](RunConfig& c, const std::string& v) {
         const auto colon = v.find(':');
         if (colon == std::string::npos) throw Error(ErrorKind::Parse, "pair: expected A:B");
         parse_choice("pair", v.substr(0, colon), {"clifford", "rp"});
         parse_choice("pair", v.substr(colon + 1), {"clifford", "rp"});
         c.pair = v;
       }},
      {"g", [](RunConfig& c, const std::string& v) { c.g = parse_choice("g", v, {"random", "file"}); }},
      {"g_file", [](RunConfig& c, const std::string& v) { c.g_file = v; }},
      {"grid", [](RunConfig& c, const std::string& v) { c.count.grid = parse_bounded("grid", v, 0, 4096); }},
      {"volume_grid", [](RunConfig& c, const std::string& v) { c.volume_grid = parse_bounded("volume_grid", v, 8, 4096); }},
      {"seed_table_grid",
       [](RunConfig& c, const std::string& v) { c.seed_table_grid = parse_bounded("seed_table_grid", v, 8, 1024); }},
      {"defect_grid", [](RunConfig& c, const std::string& v) { c.defect_grid = parse_bounded("defect_grid", v, 2, 1024); }},
      {"pairs", [](RunConfig& c, const std::string& v) { c.pairs = parse_bounded("pairs", v, 1, 100000); }},
      {"draws", [](RunConfig& c, const std::string& v) { c.draws = parse_bounded("draws", v, 1, 100000000); }},
      {"hamiltonian", [](RunConfig& c, const std::string& v) {
         c.hamiltonian_file = v;
         c.hamiltonian_text = read_file(v);
       }},
      {"time", [](RunConfig& c, const std::string& v) { c.time = parse_double("time", v); }},
      {"step", [](RunConfig& c, const std::string& v) { c.step = parse_positive("step", v); }},
      {"accept_gap", [](RunConfig& c, const std::string& v) { c.count.accept_gap = parse_positive("accept_gap", v); }},
      {"accept_residual",
       [](RunConfig& c, const std::string& v) { c.count.accept_residual = parse_positive("accept_residual", v); }},
      {"discard_gap", [](RunConfig& c, const std::string& v) { c.count.discard_gap = parse_positive("discard_gap", v); }},
      {"dedupe_radius",
       [](RunConfig& c, const std::string& v) { c.count.dedupe_radius = parse_positive("dedupe_radius", v); }},
      {"sigma_min", [](RunConfig& c, const std::string& v) { c.count.sigma_min = parse_positive("sigma_min", v); }},
      {"max_iterations",
       [](RunConfig& c, const std::string& v) { c.count.max_iterations = parse_bounded("max_iterations", v, 1, 10000); }},
      {"max_halvings",
       [](RunConfig& c, const std::string& v) { c.count.max_halvings = parse_bounded("max_halvings", v, 0, 60); }},
      {"max_excluded", [](RunConfig& c, const std::string& v) { c.max_excluded = parse_double("max_excluded", v); }},
      {"z_threshold", [](RunConfig& c, const std::string& v) { c.z_threshold = parse_positive("z_threshold", v); }},
      {"threads", [](RunConfig& c, const std::string& v) {
         c.threads = static_cast<unsigned>(parse_bounded("threads", v, 0, 4096));
       }},
      {"out", [](RunConfig& c, const std::string& v) { c.out = v; }},
      {"format", [](RunConfig& c, const std::string& v) { c.format = parse_choice("format", v, {"text", "csv", "json"}); }},
  };
  return keys;
}

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  const auto& keys = config_keys();
  const auto it = keys.find(key);
  if (it == keys.end()) throw Error(ErrorKind::Parse, "unknown config key '" + key + "'");
  it->second(c, value);
}

/// Parsed config file: ordered key/value pairs and the raw [hamiltonian] block.
struct ConfigFile {
  std::vector<std::pair<std::string, std::string>> values;
  std::string hamiltonian_text;
};

inline ConfigFile parse_config_text(const std::string& text) {
  ConfigFile file;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": bad section header");
      section = detail::trim(body.substr(1, body.size() - 2));
      if (section != "hamiltonian") throw Error(ErrorKind::Parse, "unknown section [" + section + "]");
      continue;
    }
    if (section == "hamiltonian") {
      file.hamiltonian_text += body + "\n";
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    if (config_keys().count(key) == 0) throw Error(ErrorKind::Parse, "unknown config key '" + key + "'");
    file.values.emplace_back(key, value);
  }
  return file;
}

inline void apply_config_file(RunConfig& c, const ConfigFile& file) {
  for (const auto& [k, v] : file.values) set_config_value(c, k, v);
  if (!file.hamiltonian_text.empty()) {
    if (!c.hamiltonian_file.empty()) throw Error(ErrorKind::Parse, "both a hamiltonian file and a [hamiltonian] section");
    c.hamiltonian_text = file.hamiltonian_text;
  }
}

/// Hamiltonian text format:
///   ambient <m>
///   term <coefficient>
///   <m rows of 2m reals (re im pairs) per Hermitian factor, any number of factors>
///   term <coefficient>
///   ...
/// '#' starts a comment.
inline HamiltonianSpec parse_hamiltonian(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int ambient = 0;
  std::vector<double> coefficients;
  std::vector<std::vector<std::vector<double>>> rows;  // per term
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    std::istringstream ls(body);
    std::string head;
    ls >> head;
    const std::string where = "hamiltonian line " + std::to_string(lineno);
    if (head == "ambient") {
      std::string v;
      ls >> v;
      ambient = detail::parse_bounded(where, v, 2, kMaxAmbient);
    } else if (head == "term") {
      std::string v;
      ls >> v;
      coefficients.push_back(detail::parse_double(where, v));
      rows.emplace_back();
    } else {
      if (coefficients.empty()) throw Error(ErrorKind::Parse, where + ": matrix row before any 'term'");
      std::vector<double> row{detail::parse_double(where, head)};
      std::string tok;
      while (ls >> tok) row.push_back(detail::parse_double(where, tok));
      rows.back().push_back(std::move(row));
    }
    std::string rest;
    if ((head == "ambient" || head == "term") && (ls >> rest)) throw Error(ErrorKind::Parse, where + ": trailing tokens");
  }
  if (ambient == 0) throw Error(ErrorKind::Parse, "hamiltonian: missing 'ambient'");
  std::vector<HamiltonianTerm> terms;
  for (std::size_t t = 0; t < coefficients.size(); ++t) {
    const auto& r = rows[t];
    if (r.empty() || r.size() % static_cast<std::size_t>(ambient) != 0) {
      throw Error(ErrorKind::Parse, "hamiltonian term " + std::to_string(t) + ": rows must come in blocks of " +
                                        std::to_string(ambient));
    }
    HamiltonianTerm term;
    term.coefficient = coefficients[t];
    for (std::size_t f = 0; f < r.size() / ambient; ++f) {
      CMat a(ambient, ambient);
      for (int i = 0; i < ambient; ++i) {
        const auto& row = r[f * ambient + i];
        if (row.size() != static_cast<std::size_t>(2 * ambient)) {
          throw Error(ErrorKind::Parse, "hamiltonian term " + std::to_string(t) + ": each row needs " +
                                            std::to_string(2 * ambient) + " reals");
        }
        for (int j = 0; j < ambient; ++j) a(i, j) = cplx(row[2 * j], row[2 * j + 1]);
      }
      term.factors.push_back(a);
    }
    terms.push_back(std::move(term));
  }
  return HamiltonianSpec(ambient, terms);
}

/// Inverse of parse_hamiltonian, exact under round trip (17 significant digits).
inline std::string format_hamiltonian(const HamiltonianSpec& h) {
  std::ostringstream out;
  out.precision(17);
  out << "ambient " << h.ambient() << "\n";
  for (const auto& t : h.terms()) {
    out << "term " << t.coefficient << "\n";
    for (const auto& a : t.factors) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          out << (j ? " " : "") << a(i, j).real() << " " << a(i, j).imag();
        }
        out << "\n";
      }
    }
  }
  return out.str();
}

/// m rows of 2m reals; rejected unless unitary to 1e-10.
inline UnitaryMatrix parse_unitary(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    std::istringstream ls(body);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(detail::parse_double("matrix", tok));
    rows.push_back(std::move(row));
  }
  const int m = static_cast<int>(rows.size());
  if (m < 2 || m > kMaxAmbient) throw Error(ErrorKind::Parse, "matrix: expected 2 to 8 rows");
  UnitaryMatrix u;
  u.entries.resize(m, m);
  for (int i = 0; i < m; ++i) {
    if (rows[i].size() != static_cast<std::size_t>(2 * m)) {
      throw Error(ErrorKind::Parse, "matrix: each row needs " + std::to_string(2 * m) + " reals");
    }
    for (int j = 0; j < m; ++j) u.entries(i, j) = cplx(rows[i][2 * j], rows[i][2 * j + 1]);
  }
  if (unitarity_defect(u.entries) > 1e-10) throw Error(ErrorKind::Parse, "matrix: not unitary");
  return u;
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json count = {{"grid", c.count.grid},
                          {"accept_gap", c.count.accept_gap},
                          {"accept_residual", c.count.accept_residual},
                          {"discard_gap", c.count.discard_gap},
                          {"dedupe_radius", c.count.dedupe_radius},
                          {"sigma_min", c.count.sigma_min},
                          {"max_iterations", c.count.max_iterations},
                          {"max_halvings", c.count.max_halvings}};
  return {{"command", c.command},
          {"n", c.n},
          {"n_max", c.n_max},
          {"seed", c.seed},
          {"samples", c.samples},
          {"model", c.model},
          {"pair", c.pair},
          {"g", c.g},
          {"g_file", c.g_file},
          {"volume_grid", c.volume_grid},
          {"seed_table_grid", c.seed_table_grid},
          {"defect_grid", c.defect_grid},
          {"pairs", c.pairs},
          {"draws", c.draws},
          {"hamiltonian_file", c.hamiltonian_file},
          {"hamiltonian", c.hamiltonian_text},
          {"time", c.time},
          {"step", c.step},
          {"counting", count},
          {"max_excluded", c.max_excluded},
          {"z_threshold", c.z_threshold},
          {"threads", c.threads},
          {"out", c.out},
          {"format", c.format}};
}

}  // namespace cpgeom

#endif  // CPGEOM_CONFIG_HPP
