// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <cpgeom/cli.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace cpgeom;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string num(double x, int digits = 10) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Flow of c z*Az is [exp(-2ict A) z].
constexpr double kOrbit = -2.0;

Outcome constants_exact() {
  const ConstantsRow r = constants_row(2);
  const double pi = kPi;
  struct Item {
    const char* name;
    double got, want;
  } items[] = {{"vol(RP^2)", r.vol_rp_n, 2 * pi},
               {"vol(SU(3))/c_2", r.eqsup_ratio, 4 * pi * pi / 3},
               {"vol(L_2)", r.vol_clifford_n, 4 * pi * pi / (3 * std::sqrt(3.0))},
               {"lower bound", r.lower_bound, 4 * pi / std::sqrt(3.0)},
               {"a_2", r.a_n, 3 / pi}};
  Outcome o{true, ""};
  double worst = 0.0;
  for (const auto& it : items) {
    const double e = rel(it.got, it.want);
    worst = std::max(worst, e);
    if (!(e <= 1e-12)) {
      o.passed = false;
      o.detail += std::string(it.name) + " off by " + num(e, 3) + "; ";
    }
  }
  o.detail += "worst relative error " + num(worst, 3) + ", a_2 = " + r.a_n_sym;
  return o;
}

Outcome volume_quadrature() {
  const double l2 = volume(ParametricLagrangian::clifford(2), 64).value;
  const double rp2 = volume(ParametricLagrangian::real_projective(2), 64).value;
  const double l1 = volume(ParametricLagrangian::clifford(1), 64).value;
  const double e_l2 = rel(l2, clifford_volume(2));
  const double e_rp2 = std::abs(rp2 - 2 * kPi);
  const double e_l1 = std::abs(l1 - kPi);
  return {e_l2 <= 1e-8 && e_rp2 <= 1e-6 && e_l1 <= 1e-10,
          "vol(L_2) rel " + num(e_l2, 3) + ", vol(RP^2) abs " + num(e_rp2, 3) + ", vol(L_1) abs " + num(e_l1, 3)};
}

Outcome rp_calibration() {
  const auto rp = ParametricLagrangian::real_projective(2);
  const KinematicEstimate e = mc_estimate(rp, rp, 200, 2024, {});
  bool ok = e.excluded_fraction <= 0.02;
  double worst = 0.0;
  int bad = 0;
  for (const auto& r : e.records) {
    if (r.flag != IntersectionFlag::Clean) continue;
    if (r.count != 3 || !r.oracle_count || *r.oracle_count != r.count || !r.oracle_distance || !(*r.oracle_distance <= 1e-6)) {
      ++bad;
    }
    if (r.oracle_distance) worst = std::max(worst, *r.oracle_distance);
  }
  ok = ok && bad == 0 && e.summary.clean > 0;
  return {ok, "clean " + std::to_string(e.summary.clean) + "/200, mean " + num(e.mean) + ", mismatches " +
                  std::to_string(bad) + ", worst oracle distance " + num(worst, 3) + ", excluded " +
                  num(e.excluded_fraction, 3)};
}

Outcome great_circles() {
  const auto l1 = ParametricLagrangian::clifford(1);
  const KinematicEstimate e = mc_estimate(l1, l1, 100, 2024, {});
  bool ok = e.mean == 2.0 && e.summary.clean > 0;
  for (const auto& r : e.records) {
    if (r.flag == IntersectionFlag::Clean && r.count != 2) ok = false;
  }
  return {ok, "clean " + std::to_string(e.summary.clean) + "/100, mean " + num(e.mean, 17) + ", counts in [" +
                  std::to_string(e.summary.min_count) + ", " + std::to_string(e.summary.max_count) + "]"};
}

Outcome torus_kinematic() {
  const auto l2 = ParametricLagrangian::clifford(2);
  const KinematicEstimate e = mc_estimate(l2, l2, 300, 2024, {});
  const bool z_ok = e.z_score && std::abs(*e.z_score) <= 3.0;
  const bool ok = z_ok && e.summary.all_even && e.summary.min_count >= 4 && e.excluded_fraction <= 0.02;
  std::string hist;
  for (const auto& [c, f] : e.summary.histogram) hist += " " + std::to_string(c) + ":" + std::to_string(f);
  return {ok, "mean " + num(e.mean, 6) + " +- " + num(e.std_error, 3) + " vs " + num(e.predicted, 6) + ", z " +
                  (e.z_score ? num(*e.z_score, 3) : std::string("n/a")) + ", counts" + hist + ", excluded " +
                  num(e.excluded_fraction, 3)};
}

Outcome flow_oracles() {
  std::mt19937_64 eng(2024);
  std::normal_distribution<double> normal;
  auto random_point = [&](int m) {
    CVec z(m);
    for (int i = 0; i < m; ++i) z(i) = cplx(normal(eng), normal(eng));
    return ProjectivePoint(z);
  };
  double orbit_err = 0.0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const HamiltonianSpec h = random_quadratic_hamiltonian(2, derive_stream(2024, i));
    const CMat& a = h.terms()[0].factors[0];
    for (int k = 0; k < 4; ++k) {
      const ProjectivePoint p = random_point(3);
      const ProjectivePoint end = flow_point(h, p, 1.0, 1e-3);
      orbit_err = std::max(orbit_err, fs_distance(end, transform(unitary_exp(a, kOrbit * h.terms()[0].coefficient), p)));
    }
  }
  double defect = 0.0, drift = 0.0;
  const auto base = ParametricLagrangian::clifford(2);
  for (std::uint64_t i = 0; i < 5; ++i) {
    const HamiltonianSpec h = random_quartic_hamiltonian(2, derive_stream(2025, i));
    defect = std::max(defect, lagrangian_defect(deform_lagrangian(base, h, 0.3, 1e-3), 20));
    for (int k = 0; k < 4; ++k) drift = std::max(drift, integrate_flow(h, random_point(3), 1.0, 1e-3).max_drift);
  }
  return {orbit_err <= 1e-6 && defect <= 1e-6 && drift <= 1e-6,
          "orbit distance " + num(orbit_err, 3) + ", frame defect " + num(defect, 3) + ", energy drift " + num(drift, 3)};
}

Outcome deformation_bound() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const HamiltonianSpec h = random_quartic_hamiltonian(2, derive_stream(2026, i));
    const ChoCheckReport r = cho_check(h, 0.3, 40, 2026 + i, {});
    const bool this_ok = r.count_bound_holds && r.ratio_bound_holds && r.lagrangian_defect <= 1e-6;
    ok = ok && this_ok;
    detail += "\n    H" + std::to_string(i) + ": c " + num(h.terms()[0].coefficient, 4) + ", ratio " +
              num(r.volume_ratio, 8) + ", min count " + std::to_string(r.estimate.summary.min_count) + ", mean " +
              num(r.estimate.mean, 4) + ", excluded " + num(r.estimate.excluded_fraction, 3) +
              ", vol(P) >= vol(L_2): " + (r.oh_conjecture_observed ? "yes" : "no") + (this_ok ? "" : "  <-- violation");
  }
  return {ok, "bound a_2 = 3/pi = " + num(3 / kPi, 8) + detail};
}

Outcome sigma_constancy() {
  const SigmaConstancyReport two = sigma_constancy_test(2, 5, 10000, 2024);
  const SigmaConstancyReport one = sigma_constancy_test(1, 5, 10000, 2024);
  const bool ok = two.max_pairwise_z <= 3.0 && one.analytic_z && *one.analytic_z <= 3.0;
  std::string means;
  for (const auto& c : two.configurations) means += " " + num(c.mean, 6);
  return {ok, "n=2 means" + means + ", max pairwise z " + num(two.max_pairwise_z, 3) + "; n=1 worst z vs 2/pi " +
                  (one.analytic_z ? num(*one.analytic_z, 3) : std::string("n/a"))};
}

Outcome determinism() {
  const char* data = std::getenv("CPGEOM_DATA_DIR");
  const std::string quartic = std::string(data ? data : "data") + "/quartic.ham";
  const fs::path dir = fs::temp_directory_path() / "cpgeom_acceptance_determinism";
  const std::vector<std::vector<std::string>> commands{
      {"constants", "--n-max", "8"},
      {"volume", "--model", "clifford", "--n", "2", "--grid", "32"},
      {"intersect", "--n", "2", "--pair", "rp:rp", "--seed", "3"},
      {"crofton", "--n", "2", "--pair", "rp:rp", "--samples", "50", "--seed", "7"},
      {"crofton", "--n", "1", "--pair", "clifford:clifford", "--samples", "100", "--seed", "7"},
      {"crofton", "--n", "2", "--pair", "clifford:clifford", "--samples", "30", "--seed", "7", "--volume-grid", "32"},
      {"sigma-check", "--n", "2", "--pairs", "3", "--draws", "2000", "--seed", "7"},
      {"deform", "--hamiltonian", quartic, "--time", "0.3", "--volume-grid", "16"},
      {"cho-check", "--hamiltonian", quartic, "--time", "0.3", "--samples", "30", "--seed", "7", "--volume-grid", "32"}};
  bool ok = true;
  std::string detail;
  for (const auto& cmd : commands) {
    std::string dumps[2];
    int codes[2] = {0, 0};
    for (int rep = 0; rep < 2; ++rep) {
      fs::remove_all(dir);
      std::vector<std::string> args{"cpgeom"};
      args.insert(args.end(), cmd.begin(), cmd.end());
      args.insert(args.end(), {"--out", dir.string()});
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      codes[rep] = run(static_cast<int>(argv.size()), argv.data(), out, err);
      std::ifstream in(dir / (cmd[0] + ".json"));
      if (in) dumps[rep] = deterministic_part(json::parse(in)).dump(1);
    }
    const bool same = !dumps[0].empty() && dumps[0] == dumps[1] && codes[0] == codes[1] && codes[0] != kExitUsage &&
                      codes[0] != kExitNumerical;
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + cmd[0] + (same ? " ok" : " DIFFERS");
  }
  fs::remove_all(dir);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::tuple<int, const char*, double, std::function<Outcome()>>> criteria{
      {1, "closed-form constants", 1.0, constants_exact},
      {2, "volume quadrature", 10.0, volume_quadrature},
      {3, "RP^2 calibration with eigen oracle", 600.0, rp_calibration},
      {4, "great circles n=1", 60.0, great_circles},
      {5, "kinematic formula for the n=2 torus", 1800.0, torus_kinematic},
      {6, "Hamiltonian flow oracles", 120.0, flow_oracles},
      {7, "deformation bound on quartic flows", 1800.0, deformation_bound},
      {8, "sigma constancy", 300.0, sigma_constancy},
      {9, "determinism of CLI reports", 0.0, determinism}};
  int failures = 0;
  for (const auto& [id, name, budget, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = budget <= 0.0 || secs <= budget;
    if (!in_time) o.detail += "; over the " + num(budget, 6) + " s budget";
    const bool pass = o.passed && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s (%.1f s) %s\n", pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
