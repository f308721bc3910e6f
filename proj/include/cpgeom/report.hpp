#ifndef CPGEOM_REPORT_HPP
#define CPGEOM_REPORT_HPP

// JSON serialization of results and the streaming per-sample CSV log. Wall-clock data goes
// only under "metadata" or into the CSV, so the rest of a report is reproducible byte for
// byte.

#include "config.hpp"
#include "constants.hpp"
#include "kinematic.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>

namespace cpgeom {

using json = nlohmann::json;

inline json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

/// Gauge-fixed representative as [[re, im], ...].
inline json to_json(const ProjectivePoint& p) {
  const ProjectivePoint g = gauge_fix(p);
  json out = json::array();
  for (Eigen::Index i = 0; i < g.ambient(); ++i) out.push_back({g.z()(i).real(), g.z()(i).imag()});
  return out;
}

inline json matrix_json(const CMat& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    out.push_back(row);
  }
  return out;
}

inline json to_json(const HamiltonianSpec& h) {
  json terms = json::array();
  for (const auto& t : h.terms()) {
    json factors = json::array();
    for (const auto& a : t.factors) factors.push_back(matrix_json(a));
    terms.push_back({{"coefficient", t.coefficient}, {"factors", factors}});
  }
  return {{"ambient", h.ambient()}, {"terms", terms}};
}

inline json to_json(const ParametricLagrangian& l) {
  json out = {{"kind", to_string(l.kind())}, {"n", l.n()}};
  if (l.base()) out["base"] = to_json(*l.base());
  if (l.kind() == ModelKind::UnitaryImage) out["unitary"] = matrix_json(l.unitary());
  if (l.kind() == ModelKind::Deformed) {
    out["hamiltonian"] = to_json(*l.hamiltonian());
    out["time"] = l.time();
    out["step"] = l.step();
  }
  return out;
}

inline json to_json(const VolumeEstimate& v) {
  return {{"value", v.value},
          {"coarse", v.coarse},
          {"fine", v.fine},
          {"richardson_gauge", v.richardson_gauge},
          {"integrand_stddev", v.integrand_stddev},
          {"grid", v.grid}};
}

inline json to_json(const CountDiagnostics& d) {
  return {{"seeds_tried", d.seeds_tried},         {"converged", d.converged},
          {"stalled", d.stalled},                 {"near_misses", d.near_misses},
          {"budget_exceeded", d.budget_exceeded}, {"frame_failures", d.frame_failures},
          {"iteration_histogram", d.iteration_histogram}, {"note", d.note}};
}

inline json to_json(const IntersectionReport& r) {
  json points = json::array();
  for (const auto& p : r.points) points.push_back(to_json(p));
  return {{"count", r.count},
          {"points", points},
          {"sigmas", r.sigmas},
          {"min_sigma", optional_json(r.min_sigma)},
          {"flag", to_string(r.flag)},
          {"method", to_string(r.method)},
          {"diagnostics", to_json(r.diagnostics)}};
}

/// Sample records without their wall times.
inline json to_json(const SampleRecord& r) {
  json out = {{"sample_index", r.index},
              {"count", r.count},
              {"min_sigma", optional_json(r.min_sigma)},
              {"flag", to_string(r.flag)}};
  if (r.oracle_count) out["oracle_count"] = *r.oracle_count;
  if (r.oracle_distance) out["oracle_distance"] = *r.oracle_distance;
  return out;
}

inline json to_json(const KinematicEstimate& e) {
  json hist = json::object();
  for (const auto& [count, freq] : e.summary.histogram) hist[std::to_string(count)] = freq;
  json records = json::array();
  for (const auto& r : e.records) records.push_back(to_json(r));
  return {{"pair", {e.p_descriptor, e.q_descriptor}},
          {"n", e.n},
          {"samples", e.samples},
          {"clean_samples", e.summary.clean},
          {"mean", e.mean},
          {"std_error", e.std_error},
          {"predicted", e.predicted},
          {"z_score", optional_json(e.z_score)},
          {"excluded_fraction", e.excluded_fraction},
          {"master_seed", e.master_seed},
          {"vol_p", e.vol_p},
          {"vol_q", e.vol_q},
          {"vol_p_gauge", e.vol_p_gauge},
          {"vol_q_gauge", e.vol_q_gauge},
          {"min_count", e.summary.min_count},
          {"max_count", e.summary.max_count},
          {"all_even", e.summary.all_even},
          {"histogram", hist},
          {"records", records}};
}

inline json to_json(const SigmaConstancyReport& s) {
  json configs = json::array();
  for (const auto& c : s.configurations) {
    configs.push_back({{"description", c.description}, {"mean", c.mean}, {"std_error", c.std_error}});
  }
  return {{"n", s.n},
          {"draws", s.draws},
          {"master_seed", s.master_seed},
          {"configurations", configs},
          {"max_pairwise_z", s.max_pairwise_z},
          {"analytic", optional_json(s.analytic)},
          {"analytic_z", optional_json(s.analytic_z)}};
}

inline json to_json(const ChoCheckReport& c) {
  return {{"n", c.n},
          {"time", c.time},
          {"step", c.step},
          {"lagrangian_defect", c.lagrangian_defect},
          {"vol_p", c.vol_p},
          {"vol_p_gauge", c.vol_p_gauge},
          {"vol_clifford", c.vol_clifford},
          {"volume_ratio", c.volume_ratio},
          {"a_n", c.a_n},
          {"ratio_bound_holds", c.ratio_bound_holds},
          {"oh_conjecture_observed", c.oh_conjecture_observed},
          {"cho_bound", c.cho_bound},
          {"count_bound_holds", c.count_bound_holds},
          {"estimate", to_json(c.estimate)}};
}

inline json to_json(const ConstantsRow& r) {
  auto sym = [](const std::string& s) { return s.empty() ? json(nullptr) : json(s); };
  return {{"n", r.n},
          {"vol_sphere_n", r.vol_sphere_n},
          {"vol_rp_n", r.vol_rp_n},
          {"vol_clifford_n", r.vol_clifford_n},
          {"eqsup_ratio", r.eqsup_ratio},
          {"lower_bound", r.lower_bound},
          {"a_n", r.a_n},
          {"symbolic",
           {{"vol_sphere_n", sym(r.vol_sphere_n_sym)},
            {"vol_rp_n", sym(r.vol_rp_n_sym)},
            {"vol_clifford_n", sym(r.vol_clifford_n_sym)},
            {"eqsup_ratio", sym(r.eqsup_ratio_sym)},
            {"lower_bound", sym(r.lower_bound_sym)},
            {"a_n", sym(r.a_n_sym)}}}};
}

/// Copy of a report with the "metadata" member removed; the part covered by the
/// determinism guarantee.
inline json deterministic_part(json report) {
  report.erase("metadata");
  return report;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << text;
}

/// Per-sample CSV, flushed after every row.
class SampleCsv {
 public:
  explicit SampleCsv(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out_ << header() << "\n" << std::flush;
  }

  static const char* header() { return "sample_index,count,min_sigma,flag,seconds"; }

  static std::string row(const SampleRecord& r) {
    char sigma[32] = "";
    if (r.min_sigma) std::snprintf(sigma, sizeof sigma, "%.17g", *r.min_sigma);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu,%d,%s,%s,%.6f", static_cast<unsigned long long>(r.index), r.count, sigma,
                  to_string(r.flag), r.seconds);
    return buf;
  }

  void write(const SampleRecord& r) {
    std::lock_guard<std::mutex> lock(mu_);
    out_ << row(r) << "\n" << std::flush;
  }

 private:
  std::ofstream out_;
  std::mutex mu_;
};

}  // namespace cpgeom

#endif  // CPGEOM_REPORT_HPP
