#include <cpgeom/cli.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cpgeom;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cpgeom_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string data_dir() {
  const char* d = std::getenv("CPGEOM_DATA_DIR");
  return d ? d : "data";
}

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cpgeom");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST(Config, ParsesKeysAndSection) {
  const ConfigFile f = parse_config_text(
      "# comment\ncommand = crofton\nn = 2  # trailing\n\nseed=7\n[hamiltonian]\nambient 3\nterm 1\n1 0 0 0 0 0\n0 0 1 0 0 0\n0 0 0 0 1 0\n");
  RunConfig c;
  apply_config_file(c, f);
  EXPECT_EQ(c.command, "crofton");
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.seed, 7u);
  const HamiltonianSpec h = parse_hamiltonian(c.hamiltonian_text);
  EXPECT_EQ(h.ambient(), 3);
  EXPECT_NEAR(h.value(CVec::Ones(3)), 1.0, 1e-15);
}

TEST(Config, RejectsUnknownAndMalformed) {
  EXPECT_THROW(parse_config_text("colour = blue\n"), Error);
  EXPECT_THROW(parse_config_text("[extras]\n"), Error);
  EXPECT_THROW(parse_config_text("just words\n"), Error);
  RunConfig c;
  EXPECT_THROW(set_config_value(c, "n", "two"), Error);
  EXPECT_THROW(set_config_value(c, "n", "0"), Error);
  EXPECT_THROW(set_config_value(c, "seed", "-1"), Error);
  EXPECT_THROW(set_config_value(c, "pair", "clifford"), Error);
  EXPECT_THROW(set_config_value(c, "pair", "clifford:torus"), Error);
  EXPECT_THROW(set_config_value(c, "format", "xml"), Error);
  EXPECT_THROW(set_config_value(c, "step", "0"), Error);
  EXPECT_THROW(set_config_value(c, "time", "nan"), Error);
  EXPECT_NO_THROW(set_config_value(c, "seed", "18446744073709551615"));
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
}

TEST(Hamiltonian, RoundTrip) {
  const HamiltonianSpec h = random_quartic_hamiltonian(2, derive_stream(1, 2));
  const HamiltonianSpec back = parse_hamiltonian(format_hamiltonian(h));
  ASSERT_EQ(back.terms().size(), 1u);
  EXPECT_EQ(back.terms()[0].coefficient, h.terms()[0].coefficient);
  for (int f = 0; f < 2; ++f) EXPECT_EQ(back.terms()[0].factors[f], h.terms()[0].factors[f]);
}

TEST(Hamiltonian, RejectsBadInput) {
  EXPECT_THROW(parse_hamiltonian("term 1\n1 0 0 0\n0 0 1 0\n"), Error);             // no ambient
  EXPECT_THROW(parse_hamiltonian("ambient 2\n1 0 0 0\n0 0 1 0\n"), Error);          // row before term
  EXPECT_THROW(parse_hamiltonian("ambient 2\nterm 1\n1 0 0 0\n"), Error);           // incomplete block
  EXPECT_THROW(parse_hamiltonian("ambient 2\nterm 1\n1 0 0\n0 0 1 0\n"), Error);    // short row
  EXPECT_THROW(parse_hamiltonian("ambient 2\nterm 1\n1 0 1 0\n0 0 1 0\n"), Error);  // not Hermitian
  EXPECT_NO_THROW(parse_hamiltonian("ambient 2\nterm 1\n1 0 0 1\n0 -1 1 0\n"));
}

TEST(Hamiltonian, ShippedFilesParse) {
  for (const char* name : {"quartic.ham", "quadratic.ham"}) {
    const HamiltonianSpec h = parse_hamiltonian(detail::read_file(data_dir() + "/" + name));
    EXPECT_EQ(h.ambient(), 3);
  }
}

TEST(Unitary, ParseAndValidate) {
  EXPECT_NO_THROW(parse_unitary("0 0 1 0\n1 0 0 0\n"));
  EXPECT_THROW(parse_unitary("1 0 1 0\n0 0 1 0\n"), Error);
  EXPECT_THROW(parse_unitary("1 0\n"), Error);
}

TEST(Cli, ConstantsTableAndFormats) {
  const fs::path dir = scratch("constants");
  CliResult r = run_cli({"constants", "--n-max", "3", "--out", dir.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("3/pi"), std::string::npos);
  EXPECT_NE(r.out.find("0.954929658551"), std::string::npos);
  const json rep = load(dir / "constants.json");
  EXPECT_EQ(rep["artifact_version"], kArtifactVersion);
  EXPECT_EQ(rep["config"]["n_max"], 3);
  EXPECT_EQ(rep["result"]["rows"][1]["symbolic"]["a_n"], "3/pi");
  EXPECT_NEAR(rep["result"]["rows"][1]["a_n"].get<double>(), 3 / kPi, 1e-15);

  r = run_cli({"constants", "--n-max", "2", "--format", "csv", "--out", dir.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("n,vol_sphere_n", 0), 0u);
  r = run_cli({"constants", "--n-max", "2", "--format", "json", "--out", dir.string()});
  EXPECT_EQ(json::parse(r.out)["command"], "constants");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"nonsense"}).code, 2);
  EXPECT_EQ(run_cli({"volume", "--model", "sphere"}).code, 2);
  EXPECT_EQ(run_cli({"volume", "--bogus", "1"}).code, 2);
  EXPECT_EQ(run_cli({"crofton", "--samples", "10", "--out", scratch("usage").string()}).code, 2);
  EXPECT_EQ(run_cli({"deform", "--out", scratch("usage").string()}).code, 2);
  EXPECT_EQ(run_cli({"--config", "/nonexistent/file.cfg"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"--version"}).code, 0);
}

TEST(Cli, CroftonCalibrationWithCsv) {
  const fs::path dir = scratch("crofton");
  const CliResult r = run_cli({"crofton", "--n", "2", "--pair", "rp:rp", "--samples", "50", "--seed", "7", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const json rep = load(dir / "crofton.json");
  EXPECT_EQ(rep["result"]["estimate"]["mean"], 3.0);
  EXPECT_EQ(rep["result"]["estimate"]["std_error"], 0.0);
  EXPECT_TRUE(rep["result"]["estimate"]["z_score"].is_null());
  std::ifstream csv(dir / "crofton.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "sample_index,count,min_sigma,flag,seconds");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 50);
}

TEST(Cli, GreatCircleMean) {
  const fs::path dir = scratch("great");
  const CliResult r = run_cli({"crofton", "--n", "1", "--pair", "clifford:clifford", "--samples", "100", "--seed", "1",
                         "--out", dir.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(load(dir / "crofton.json")["result"]["estimate"]["mean"], 2.0);
}

TEST(Cli, DeterministicReports) {
  // identical argv, including the output directory
  const fs::path shared = scratch("det_shared");
  const std::vector<std::string> args{"crofton", "--n", "2", "--pair", "clifford:clifford", "--samples", "30",
                                      "--seed", "3", "--out", shared.string()};
  run_cli(args);
  const json first = load(shared / "crofton.json");
  run_cli(args);
  const json second = load(shared / "crofton.json");
  EXPECT_EQ(deterministic_part(first).dump(2), deterministic_part(second).dump(2));
  EXPECT_TRUE(first["metadata"].contains("timestamp"));
  EXPECT_TRUE(first["metadata"].contains("sample_seconds"));
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  const fs::path dir = scratch("config");
  write(dir / "run.cfg", "command = volume\nmodel = rp\nn = 1\nvolume_grid = 16\nout = " + dir.string() + "\n");
  CliResult r = run_cli({"--config", (dir / "run.cfg").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  json rep = load(dir / "volume.json");
  EXPECT_EQ(rep["config"]["model"], "rp");
  EXPECT_EQ(rep["config"]["volume_grid"], 16);
  r = run_cli({"--config", (dir / "run.cfg").string(), "volume", "--grid", "32"});
  EXPECT_EQ(r.code, 0) << r.err;
  rep = load(dir / "volume.json");
  EXPECT_EQ(rep["config"]["volume_grid"], 32);
  EXPECT_EQ(rep["config"]["model"], "rp");
  write(dir / "bad.cfg", "command = volume\nshape = round\n");
  EXPECT_EQ(run_cli({"--config", (dir / "bad.cfg").string()}).code, 2);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const fs::path dir = scratch("env");
  setenv("CPGEOM_OUT_DIR", dir.string().c_str(), 1);
  const CliResult r = run_cli({"constants", "--n-max", "1"});
  unsetenv("CPGEOM_OUT_DIR");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir / "constants.json"));
}

TEST(Cli, IntersectWithMatrixFile) {
  const fs::path dir = scratch("intersect");
  write(dir / "g.txt", "0.7071067811865476 0 0 0.7071067811865476 0 0\n0 0.7071067811865476 0.7071067811865476 0 0 0\n0 0 0 0 0 1\n");
  // a permutation-free unitary that is not real orthogonal
  CliResult r = run_cli({"intersect", "--n", "2", "--pair", "clifford:clifford", "--g", "file", "--g-file",
                   (dir / "g.txt").string(), "--out", dir.string()});
  EXPECT_NE(r.code, 2) << r.err;
  r = run_cli({"intersect", "--n", "2", "--pair", "rp:rp", "--seed", "5", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const json rep = load(dir / "intersect.json");
  EXPECT_EQ(rep["result"]["report"]["count"], 3);
  EXPECT_EQ(rep["result"]["report"]["points"].size(), 3u);
  EXPECT_EQ(run_cli({"intersect", "--n", "2", "--g", "file", "--out", dir.string()}).code, 2);
}

TEST(Cli, NumericalFailureExitCode) {
  const fs::path dir = scratch("numerical");
  const CliResult r = run_cli({"crofton", "--n", "1", "--samples", "30", "--sigma-min", "2", "--out", dir.string()});
  EXPECT_EQ(r.code, 3);
  const json rep = load(dir / "crofton.json");
  EXPECT_EQ(rep["result"]["error"]["kind"], "TooManyExcluded");
}

TEST(Cli, AcceptanceFailureExitCode) {
  // an impossible z threshold turns a healthy run into an acceptance failure
  const fs::path dir = scratch("acceptance");
  const CliResult r = run_cli({"sigma-check", "--n", "2", "--pairs", "3", "--draws", "1000", "--seed", "1", "--z-threshold",
                         "1e-9", "--out", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, DeformReportsDescriptorAndVolume) {
  const fs::path dir = scratch("deform");
  const CliResult r = run_cli({"deform", "--hamiltonian", data_dir() + "/quartic.ham", "--time", "0.3", "--volume-grid", "16",
                         "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const json rep = load(dir / "deform.json");
  EXPECT_EQ(rep["result"]["model"]["kind"], "deformed");
  EXPECT_EQ(rep["result"]["model"]["base"]["kind"], "clifford");
  EXPECT_EQ(rep["result"]["model"]["hamiltonian"]["terms"][0]["factors"].size(), 2u);
  EXPECT_GE(rep["result"]["volume_ratio"].get<double>(), 3 / kPi - 1e-6);
  EXPECT_LE(rep["result"]["lagrangian_defect"].get<double>(), 1e-6);
}
