#ifndef CPGEOM_CLI_HPP
#define CPGEOM_CLI_HPP

// Command-line front end. Exit codes: 0 success, 1 acceptance failure, 2 usage error,
// 3 numerical failure.

#include "config.hpp"
#include "report.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <list>
#include <sstream>
#include <string>
#include <vector>

namespace cpgeom {

enum ExitCode : int { kExitOk = 0, kExitAcceptance = 1, kExitUsage = 2, kExitNumerical = 3 };

/// One pass/fail verdict carried in the report.
struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CommandResult {
  json result;
  std::vector<Check> checks;
  json metadata = json::object();
  std::string csv;      // stdout body for --format csv
  std::string summary;  // stdout body for --format text
};

namespace detail {

inline std::string fmt(double x, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

inline std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

inline ParametricLagrangian model_by_name(const std::string& name, int n) {
  if (name == "clifford") return ParametricLagrangian::clifford(n);
  if (name == "rp") return ParametricLagrangian::real_projective(n);
  throw Error(ErrorKind::InvalidArgument, "unknown model '" + name + "'");
}

inline std::pair<std::string, std::string> split_pair(const std::string& pair) {
  const auto colon = pair.find(':');
  return {pair.substr(0, colon), pair.substr(colon + 1)};
}

inline KinematicOptions kinematic_options(const RunConfig& c) {
  KinematicOptions o;
  o.count = c.count;
  o.volume_grid = c.volume_grid;
  o.seed_table_grid = c.seed_table_grid;
  o.threads = c.threads;
  o.max_excluded_fraction = c.max_excluded;
  return o;
}

inline HamiltonianSpec require_hamiltonian(const RunConfig& c) {
  if (c.hamiltonian_text.empty()) {
    throw Error(ErrorKind::InvalidArgument, "a Hamiltonian is required (--hamiltonian FILE or a [hamiltonian] section)");
  }
  return parse_hamiltonian(c.hamiltonian_text);
}

inline json sample_seconds(const std::vector<SampleRecord>& records) {
  json s = json::array();
  for (const auto& r : records) s.push_back(r.seconds);
  return s;
}

inline std::string records_csv(const std::vector<SampleRecord>& records) {
  std::string out = std::string(SampleCsv::header()) + "\n";
  for (const auto& r : records) out += SampleCsv::row(r) + "\n";
  return out;
}

inline std::string estimate_summary(const KinematicEstimate& e) {
  std::ostringstream s;
  s << "pair " << e.p_descriptor << ":" << e.q_descriptor << "  n=" << e.n << "  samples=" << e.samples
    << "  clean=" << e.summary.clean << "\n";
  s << "mean " << fmt(e.mean, 10) << "  std_error " << fmt(e.std_error) << "  predicted " << fmt(e.predicted, 10)
    << "  z " << (e.z_score ? fmt(*e.z_score, 4) : std::string("n/a")) << "\n";
  s << "excluded_fraction " << fmt(e.excluded_fraction) << "  counts";
  for (const auto& [count, freq] : e.summary.histogram) s << "  " << count << ":" << freq;
  s << "\n";
  return s.str();
}

// Shared acceptance test for a Monte Carlo estimate: |z| within the threshold, or an exact
// mean when the sample variance vanishes.
inline Check estimate_check(const KinematicEstimate& e, double z_threshold) {
  if (e.z_score) {
    return {"z_score", std::abs(*e.z_score) <= z_threshold,
            "|z| = " + fmt(std::abs(*e.z_score), 4) + " vs " + fmt(z_threshold)};
  }
  const double rel = std::abs(e.mean - e.predicted) / e.predicted;
  return {"zero_variance_mean", rel <= 1e-6, "relative gap " + fmt(rel)};
}

// ---- commands ----

inline CommandResult cmd_constants(const RunConfig& c) {
  CommandResult out;
  json rows = json::array();
  std::ostringstream text;
  std::ostringstream csv;
  csv << "n,vol_sphere_n,vol_rp_n,vol_clifford_n,eqsup_ratio,lower_bound,a_n,"
         "vol_sphere_n_sym,vol_rp_n_sym,vol_clifford_n_sym,eqsup_ratio_sym,lower_bound_sym,a_n_sym\n";
  text << std::left << std::setw(4) << "n" << std::setw(38) << "vol(S^n)" << std::setw(38) << "vol(RP^n)"
       << std::setw(40) << "vol(L_n)" << std::setw(38) << "vol(SU(n+1))/c_n" << std::setw(38) << "lower_bound"
       << "a_n\n";
  bool chain_ok = true;
  for (int n = 1; n <= c.n_max; ++n) {
    const ConstantsRow r = constants_row(n);
    rows.push_back(to_json(r));
    const double chain = std::abs(r.lower_bound * r.lower_bound - std::pow(2.0, n) * r.eqsup_ratio) /
                         (r.lower_bound * r.lower_bound);
    const double closed = std::abs(r.a_n - lower_bound_and_a(n).a_n_closed_form) / r.a_n;
    if (chain > 1e-12 || closed > 1e-12) chain_ok = false;
    auto cell = [](double v, const std::string& sym) { return fixed(v, 12) + (sym.empty() ? "" : " = " + sym); };
    text << std::left << std::setw(4) << n << std::setw(38) << cell(r.vol_sphere_n, r.vol_sphere_n_sym)
         << std::setw(38) << cell(r.vol_rp_n, r.vol_rp_n_sym) << std::setw(40)
         << cell(r.vol_clifford_n, r.vol_clifford_n_sym) << std::setw(38) << cell(r.eqsup_ratio, r.eqsup_ratio_sym)
         << std::setw(38) << cell(r.lower_bound, r.lower_bound_sym) << cell(r.a_n, r.a_n_sym) << "\n";
    csv << n << std::setprecision(17) << "," << r.vol_sphere_n << "," << r.vol_rp_n << "," << r.vol_clifford_n << ","
        << r.eqsup_ratio << "," << r.lower_bound << "," << r.a_n << "," << r.vol_sphere_n_sym << "," << r.vol_rp_n_sym
        << "," << r.vol_clifford_n_sym << "," << r.eqsup_ratio_sym << "," << r.lower_bound_sym << "," << r.a_n_sym
        << "\n";
  }
  out.result = {{"rows", rows}};
  out.checks.push_back({"chain_identities", chain_ok, "lower_bound^2 = 2^n eqsup_ratio and both a_n forms agree"});
  out.summary = text.str();
  out.csv = csv.str();
  return out;
}

inline CommandResult cmd_volume(const RunConfig& c) {
  CommandResult out;
  const ParametricLagrangian l = model_by_name(c.model, c.n);
  const VolumeEstimate v = volume(l, c.volume_grid, c.threads);
  const bool rp = c.model == "rp";
  const double exact = rp ? rp_volume(c.n) : clifford_volume(c.n);
  const ConstantsRow row = constants_row(c.n);
  const std::string sym = rp ? row.vol_rp_n_sym : row.vol_clifford_n_sym;
  const double rel = std::abs(v.value - exact) / exact;
  out.result = {{"model", to_json(l)},
                {"volume", to_json(v)},
                {"closed_form", exact},
                {"closed_form_sym", sym.empty() ? json(nullptr) : json(sym)},
                {"relative_error", rel}};
  out.checks.push_back({"closed_form_agreement", rel <= 1e-6, "relative error " + fmt(rel)});
  out.summary = "vol(" + c.model + ", n=" + std::to_string(c.n) + ") = " + fmt(v.value, 15) + "  closed form " +
                fmt(exact, 15) + (sym.empty() ? "" : " = " + sym) + "  relative error " + fmt(rel) +
                "  richardson_gauge " + fmt(v.richardson_gauge) + "\n";
  out.csv = "model,n,grid,value,closed_form,relative_error,richardson_gauge\n" + c.model + "," + std::to_string(c.n) +
            "," + std::to_string(v.grid) + "," + fmt(v.value, 17) + "," + fmt(exact, 17) + "," + fmt(rel, 17) + "," +
            fmt(v.richardson_gauge, 17) + "\n";
  return out;
}

inline CommandResult cmd_intersect(const RunConfig& c) {
  CommandResult out;
  const auto [a, b] = split_pair(c.pair);
  const ParametricLagrangian p = model_by_name(a, c.n);
  const ParametricLagrangian q = model_by_name(b, c.n);
  UnitaryMatrix g;
  if (c.g == "file") {
    if (c.g_file.empty()) throw Error(ErrorKind::InvalidArgument, "--g file needs --g-file PATH");
    g = parse_unitary(read_file(c.g_file));
    if (g.dim() != c.n + 1) throw Error(ErrorKind::InvalidArgument, "matrix dimension does not match n + 1");
  } else {
    g = sample_group_element(c.n, c.seed, 0);
  }
  const auto target = q.level_set();
  const IntersectionReport rep = target ? count_levelset(p, *target, g, c.count) : count_parametric(p, q, g, c.count);
  out.result = {{"p", to_json(p)}, {"q", to_json(q)}, {"g", matrix_json(g.entries)}, {"report", to_json(rep)}};
  if (a == "rp" && b == "rp") {
    const IntersectionReport oracle = rp_eigen_oracle(g, c.count.sigma_min);
    const double dist = point_set_distance(oracle.points, rep.points);
    out.result["oracle"] = to_json(oracle);
    out.result["oracle_distance"] = dist;
    out.checks.push_back({"eigen_oracle_agreement", oracle.count == rep.count && dist <= 1e-6,
                          "oracle " + std::to_string(oracle.count) + " vs " + std::to_string(rep.count) +
                              ", distance " + fmt(dist)});
  }
  if (rep.flag == IntersectionFlag::Failed) throw Error(ErrorKind::ConvergenceBudgetExceeded, "counting failed");
  std::ostringstream s;
  s << "#(gP ∩ Q) = " << rep.count << "  flag " << to_string(rep.flag) << "  method " << to_string(rep.method)
    << "  min_sigma " << (rep.min_sigma ? fmt(*rep.min_sigma) : std::string("n/a")) << "\n";
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    s << "  point " << i << "  sigma " << fmt(rep.sigmas[i]) << "  " << to_json(rep.points[i]).dump() << "\n";
  }
  out.summary = s.str();
  out.csv = "count,flag,min_sigma\n" + std::to_string(rep.count) + "," + to_string(rep.flag) + "," +
            (rep.min_sigma ? fmt(*rep.min_sigma, 17) : std::string()) + "\n";
  return out;
}

inline CommandResult cmd_crofton(const RunConfig& c, SampleCsv* log) {
  CommandResult out;
  const auto [a, b] = split_pair(c.pair);
  const ParametricLagrangian p = model_by_name(a, c.n);
  const ParametricLagrangian q = model_by_name(b, c.n);
  KinematicOptions opt = kinematic_options(c);
  if (log) opt.on_sample = [log](const SampleRecord& r) { log->write(r); };
  const KinematicEstimate e = mc_estimate(p, q, c.samples, c.seed, opt);
  out.result = {{"estimate", to_json(e)}};
  out.metadata["sample_seconds"] = sample_seconds(e.records);
  out.checks.push_back(estimate_check(e, c.z_threshold));
  if (a == "rp" && b == "rp") {
    bool agree = true;
    double worst = 0.0;
    for (const auto& r : e.records) {
      if (r.flag != IntersectionFlag::Clean) continue;
      worst = std::max(worst, r.oracle_distance.value_or(0.0));
      if (r.oracle_count != r.count || r.oracle_distance.value_or(0.0) > 1e-6) agree = false;
    }
    out.checks.push_back({"eigen_oracle_agreement", agree, "worst point distance " + fmt(worst)});
    const bool exact = e.summary.clean > 0 && e.summary.min_count == c.n + 1 && e.summary.max_count == c.n + 1;
    out.checks.push_back({"calibration_count", exact, "every clean count equals n + 1"});
  }
  if (a == "clifford" && b == "clifford") {
    const bool bound = e.summary.clean > 0 && e.summary.all_even && e.summary.min_count >= (1 << c.n);
    out.checks.push_back({"even_and_cho_bound", bound, "clean counts even and >= 2^n"});
  }
  out.summary = estimate_summary(e);
  out.csv = records_csv(e.records);
  return out;
}

inline CommandResult cmd_sigma(const RunConfig& c) {
  CommandResult out;
  const SigmaConstancyReport s = sigma_constancy_test(c.n, c.pairs, c.draws, c.seed, c.threads);
  out.result = {{"sigma", to_json(s)}};
  out.checks.push_back({"pairwise_constancy", s.max_pairwise_z <= c.z_threshold,
                        "max pairwise z " + fmt(s.max_pairwise_z, 4)});
  if (s.analytic_z) {
    out.checks.push_back({"analytic_2_over_pi", *s.analytic_z <= c.z_threshold, "worst z " + fmt(*s.analytic_z, 4)});
  }
  std::ostringstream text;
  std::ostringstream csv;
  csv << "configuration,mean,std_error\n";
  for (const auto& cfg : s.configurations) {
    text << std::left << std::setw(20) << cfg.description << " " << fixed(cfg.mean, 6) << " +- " << fixed(cfg.std_error, 6)
         << "\n";
    csv << cfg.description << "," << fmt(cfg.mean, 17) << "," << fmt(cfg.std_error, 17) << "\n";
  }
  text << "max pairwise z " << fmt(s.max_pairwise_z, 4);
  if (s.analytic) text << "  analytic 2/pi = " << fixed(*s.analytic, 6) << "  worst z " << fmt(*s.analytic_z, 4);
  text << "\n";
  out.summary = text.str();
  out.csv = csv.str();
  return out;
}

inline CommandResult cmd_deform(const RunConfig& c) {
  CommandResult out;
  const HamiltonianSpec h = require_hamiltonian(c);
  const ParametricLagrangian base = ParametricLagrangian::clifford(h.n());
  const ParametricLagrangian p = deform_lagrangian(base, h, c.time, c.step);
  const VolumeEstimate v = volume(p, c.volume_grid, c.threads);
  const double defect = lagrangian_defect(p, c.defect_grid, c.threads);
  const double vol_l = clifford_volume(h.n());
  const double ratio = v.value / vol_l;
  const double a_n = lower_bound_and_a(h.n()).a_n;
  out.result = {{"model", to_json(p)},
                {"volume", to_json(v)},
                {"vol_clifford", vol_l},
                {"volume_ratio", ratio},
                {"a_n", a_n},
                {"lagrangian_defect", defect},
                {"oh_conjecture_observed", v.value >= vol_l}};
  out.checks.push_back({"lagrangian_defect", defect <= 1e-6, "max |omega| = " + fmt(defect)});
  out.checks.push_back({"volume_lower_bound", ratio >= a_n - 1e-6, "ratio " + fmt(ratio, 10) + " vs a_n " + fmt(a_n, 10)});
  out.summary = "deformed Clifford torus n=" + std::to_string(h.n()) + " T=" + fmt(c.time) + "  vol " +
                fmt(v.value, 12) + "  ratio " + fmt(ratio, 10) + "  a_n " + fmt(a_n, 10) + "  defect " + fmt(defect) +
                "  vol(P) >= vol(L_n): " + (v.value >= vol_l ? "observed" : "not observed") + "\n";
  out.csv = "volume,volume_ratio,a_n,lagrangian_defect\n" + fmt(v.value, 17) + "," + fmt(ratio, 17) + "," +
            fmt(a_n, 17) + "," + fmt(defect, 17) + "\n";
  return out;
}

inline CommandResult cmd_cho(const RunConfig& c, SampleCsv* log) {
  CommandResult out;
  const HamiltonianSpec h = require_hamiltonian(c);
  ChoOptions opt;
  opt.kinematic = kinematic_options(c);
  if (log) opt.kinematic.on_sample = [log](const SampleRecord& r) { log->write(r); };
  opt.step = c.step;
  opt.defect_grid = c.defect_grid;
  const ChoCheckReport r = cho_check(h, c.time, c.samples, c.seed, opt);
  out.result = {{"cho", to_json(r)}, {"model", to_json(deform_lagrangian(ParametricLagrangian::clifford(h.n()), h, c.time, c.step))}};
  out.metadata["sample_seconds"] = sample_seconds(r.estimate.records);
  out.checks.push_back({"lagrangian_defect", r.lagrangian_defect <= 1e-6, "max |omega| = " + fmt(r.lagrangian_defect)});
  out.checks.push_back({"cho_count_bound", r.count_bound_holds && r.estimate.summary.clean > 0,
                        "min clean count " + std::to_string(r.estimate.summary.min_count) + " vs 2^n = " +
                            std::to_string(r.cho_bound)});
  out.checks.push_back({"even_counts", r.estimate.summary.all_even, "clean counts even"});
  out.checks.push_back({"volume_lower_bound", r.ratio_bound_holds,
                        "ratio " + fmt(r.volume_ratio, 10) + " vs a_n " + fmt(r.a_n, 10)});
  out.checks.push_back(estimate_check(r.estimate, c.z_threshold));
  out.summary = estimate_summary(r.estimate) + "volume ratio " + fmt(r.volume_ratio, 10) + "  a_n " + fmt(r.a_n, 10) +
                "  defect " + fmt(r.lagrangian_defect) +
                "  vol(P) >= vol(L_2): " + (r.oh_conjecture_observed ? "observed" : "not observed") + "\n";
  out.csv = records_csv(r.estimate.records);
  return out;
}

inline bool samples_command(const std::string& cmd) { return cmd == "crofton" || cmd == "cho-check"; }

inline CommandResult dispatch(const RunConfig& c, SampleCsv* log) {
  if (c.command == "constants") return cmd_constants(c);
  if (c.command == "volume") return cmd_volume(c);
  if (c.command == "intersect") return cmd_intersect(c);
  if (c.command == "crofton") return cmd_crofton(c, log);
  if (c.command == "sigma-check") return cmd_sigma(c);
  if (c.command == "deform") return cmd_deform(c);
  if (c.command == "cho-check") return cmd_cho(c, log);
  throw Error(ErrorKind::InvalidArgument, "unknown command '" + c.command + "'");
}

inline bool usage_kind(ErrorKind k) {
  return k == ErrorKind::InvalidArgument || k == ErrorKind::Parse || k == ErrorKind::DimensionMismatch;
}

struct FlagBinding {
  CLI::Option* option = nullptr;
  std::string key;
  std::string* value = nullptr;
};

}  // namespace detail

inline json make_report(const RunConfig& c, const CommandResult& r, int exit_code, double seconds) {
  json checks = json::array();
  for (const auto& chk : r.checks) checks.push_back({{"name", chk.name}, {"passed", chk.passed}, {"detail", chk.detail}});
  json metadata = r.metadata;
  metadata["timestamp"] = utc_timestamp();
  metadata["wall_seconds"] = seconds;
  return {{"artifact_version", kArtifactVersion},
          {"command", c.command},
          {"config", to_json(c)},
          {"result", r.result},
          {"checks", checks},
          {"exit_code", exit_code},
          {"metadata", metadata}};
}

/// Parses argv, runs one command, writes <out>/<command>.json (and .csv for sampling
/// commands), prints a summary, and returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical integral geometry of Lagrangian submanifolds of CP^n", "cpgeom"};
  app.set_version_flag("--version", kArtifactVersion);
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::list<std::string> storage;
  std::vector<detail::FlagBinding> bindings;
  auto bind = [&](CLI::App* target, const std::string& flag, const std::string& key, const std::string& help) {
    storage.emplace_back();
    std::string* slot = &storage.back();
    CLI::Option* opt = target->add_option(flag, *slot, help);
    bindings.push_back({opt, key, slot});
  };

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file; flags override it");
  bind(&app, "--threads", "threads", "worker threads (0 = hardware concurrency)");
  bind(&app, "--out", "out", "output directory (default $CPGEOM_OUT_DIR or ./out)");
  bind(&app, "--format", "format", "stdout format: text|csv|json");

  auto counting = [&](CLI::App* s) {
    bind(s, "--grid", "grid", "Newton seed grid per axis (0 = default)");
    bind(s, "--accept-gap", "accept_gap", "chordal gap accepted as an intersection");
    bind(s, "--accept-residual", "accept_residual", "level-set residual accepted as an intersection");
    bind(s, "--discard-gap", "discard_gap", "gap above which a converged seed is a near miss");
    bind(s, "--dedupe-radius", "dedupe_radius", "Fubini-Study radius merging duplicate roots");
    bind(s, "--sigma-min", "sigma_min", "transversality threshold on the sigma angle");
    bind(s, "--max-iterations", "max_iterations", "Newton iteration budget per seed");
    bind(s, "--max-halvings", "max_halvings", "line-search halvings per iteration");
  };

  CLI::App* constants = app.add_subcommand("constants", "closed-form constants table");
  bind(constants, "--n-max", "n_max", "largest n in the table");

  CLI::App* vol = app.add_subcommand("volume", "quadrature volume of a model");
  bind(vol, "--model", "model", "clifford|rp");
  bind(vol, "--n", "n", "complex dimension");
  bind(vol, "--grid", "volume_grid", "quadrature nodes per axis (>= 8)");

  CLI::App* inter = app.add_subcommand("intersect", "count #(gP ∩ Q) for one group element");
  bind(inter, "--n", "n", "complex dimension");
  bind(inter, "--pair", "pair", "A:B with A, B in {clifford, rp}");
  bind(inter, "--g", "g", "random|file");
  bind(inter, "--g-file", "g_file", "unitary matrix file (rows of re im pairs)");
  bind(inter, "--seed", "seed", "master seed for --g random");
  counting(inter);

  CLI::App* crofton = app.add_subcommand("crofton", "Monte Carlo mean of #(gP ∩ Q) against the kinematic formula");
  bind(crofton, "--n", "n", "complex dimension");
  bind(crofton, "--pair", "pair", "A:B with A, B in {clifford, rp}");
  bind(crofton, "--samples", "samples", "Haar samples (>= 30)");
  bind(crofton, "--seed", "seed", "master seed");
  bind(crofton, "--volume-grid", "volume_grid", "quadrature nodes per axis");
  bind(crofton, "--max-excluded", "max_excluded", "largest tolerated excluded fraction");
  bind(crofton, "--z-threshold", "z_threshold", "acceptance bound on |z|");
  counting(crofton);

  CLI::App* sigma = app.add_subcommand("sigma-check", "constancy of the averaged sigma angle");
  bind(sigma, "--n", "n", "complex dimension");
  bind(sigma, "--pairs", "pairs", "random plane configurations (>= 3)");
  bind(sigma, "--draws", "draws", "stabilizer draws per configuration (>= 1000)");
  bind(sigma, "--seed", "seed", "master seed");
  bind(sigma, "--z-threshold", "z_threshold", "acceptance bound on z");

  CLI::App* deform = app.add_subcommand("deform", "Hamiltonian deformation of the Clifford torus");
  bind(deform, "--hamiltonian", "hamiltonian", "Hamiltonian file");
  bind(deform, "--time", "time", "flow time T");
  bind(deform, "--step", "step", "RK4 step (<= 1e-2)");
  bind(deform, "--volume-grid", "volume_grid", "quadrature nodes per axis");
  bind(deform, "--defect-grid", "defect_grid", "grid for the Lagrangian frame test");

  CLI::App* cho = app.add_subcommand("cho-check", "count bound and volume bound on a deformed torus (n = 2)");
  bind(cho, "--hamiltonian", "hamiltonian", "Hamiltonian file");
  bind(cho, "--time", "time", "flow time T");
  bind(cho, "--step", "step", "RK4 step (<= 1e-2)");
  bind(cho, "--samples", "samples", "Haar samples (>= 30)");
  bind(cho, "--seed", "seed", "master seed");
  bind(cho, "--volume-grid", "volume_grid", "quadrature nodes per axis");
  bind(cho, "--seed-table-grid", "seed_table_grid", "chart table resolution for Newton seeding");
  bind(cho, "--defect-grid", "defect_grid", "grid for the Lagrangian frame test");
  bind(cho, "--max-excluded", "max_excluded", "largest tolerated excluded fraction");
  bind(cho, "--z-threshold", "z_threshold", "acceptance bound on |z|");
  counting(cho);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  try {
    if (const char* env = std::getenv("CPGEOM_OUT_DIR"); env && *env) cfg.out = env;
    if (!config_path.empty()) apply_config_file(cfg, parse_config_text(detail::read_file(config_path)));
    const auto subs = app.get_subcommands();
    if (!subs.empty()) cfg.command = subs.front()->get_name();
    for (const auto& b : bindings) {
      if (b.option->count() > 0) set_config_value(cfg, b.key, *b.value);
    }
    if (cfg.command.empty()) throw Error(ErrorKind::Parse, "no command given");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  const std::filesystem::path dir(cfg.out);
  const std::filesystem::path report_path = dir / (cfg.command + ".json");
  CommandResult result;
  try {
    std::unique_ptr<SampleCsv> log;
    if (detail::samples_command(cfg.command)) log = std::make_unique<SampleCsv>(dir / (cfg.command + ".csv"));
    result = detail::dispatch(cfg, log.get());
  } catch (const Error& e) {
    const int code = detail::usage_kind(e.kind()) ? kExitUsage : kExitNumerical;
    err << "error: " << e.what() << "\n";
    if (code == kExitNumerical) {
      CommandResult failed;
      failed.result = {{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
      try {
        write_text_file(report_path, make_report(cfg, failed, code, elapsed()).dump(2) + "\n");
      } catch (const Error&) {
      }
    }
    return code;
  }

  bool passed = true;
  for (const auto& chk : result.checks) passed = passed && chk.passed;
  const int code = passed ? kExitOk : kExitAcceptance;
  const json report = make_report(cfg, result, code, elapsed());
  try {
    write_text_file(report_path, report.dump(2) + "\n");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (cfg.format == "json") {
    out << report.dump(2) << "\n";
  } else if (cfg.format == "csv") {
    out << result.csv;
  } else {
    out << result.summary;
    for (const auto& chk : result.checks) {
      out << (chk.passed ? "PASS " : "FAIL ") << chk.name << ": " << chk.detail << "\n";
    }
    out << "report: " << report_path.string() << "\n";
  }
  return code;
}

}  // namespace cpgeom

#endif  // CPGEOM_CLI_HPP
