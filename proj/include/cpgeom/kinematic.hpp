#ifndef CPGEOM_KINEMATIC_HPP
#define CPGEOM_KINEMATIC_HPP

// Monte Carlo checks of the kinematic formula on CP^n. Under normalized Haar measure the
// calibration against RP^n gives
//   E_g #(gP ∩ Q) = (n+1) vol(P) vol(Q) / vol(RP^n)^2,
// so no group volume or c_n is ever needed.

#include "constants.hpp"
#include "deform.hpp"
#include "intersection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cpgeom {

inline double predicted_mean(double vol_p, double vol_q, int n) {
  if (!(vol_p > 0.0) || !(vol_q > 0.0)) throw Error(ErrorKind::InvalidArgument, "volumes must be positive");
  const double rp = rp_volume(n);
  return (n + 1) * vol_p * vol_q / (rp * rp);
}

struct SampleRecord {
  std::uint64_t index = 0;
  int count = 0;
  std::optional<double> min_sigma;
  IntersectionFlag flag = IntersectionFlag::Clean;
  double seconds = 0.0;
  // RP^n pairs only: eigen-oracle count and the point-set distance to the numeric count
  std::optional<int> oracle_count;
  std::optional<double> oracle_distance;
};

struct CountSummary {
  int samples = 0;
  int clean = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double excluded_fraction = 0.0;
  int min_count = 0;
  int max_count = 0;
  bool all_even = true;
  std::map<int, int> histogram;  // clean counts
};

inline CountSummary summarize(const std::vector<SampleRecord>& records) {
  CountSummary s;
  s.samples = static_cast<int>(records.size());
  std::vector<double> counts;
  for (const auto& r : records) {
    if (r.flag != IntersectionFlag::Clean) continue;
    counts.push_back(r.count);
    ++s.histogram[r.count];
    if (r.count % 2 != 0) s.all_even = false;
  }
  s.clean = static_cast<int>(counts.size());
  s.excluded_fraction = s.samples > 0 ? static_cast<double>(s.samples - s.clean) / s.samples : 0.0;
  if (counts.empty()) return s;
  s.min_count = static_cast<int>(*std::min_element(counts.begin(), counts.end()));
  s.max_count = static_cast<int>(*std::max_element(counts.begin(), counts.end()));
  s.mean = pairwise_sum(counts) / static_cast<double>(counts.size());
  if (counts.size() > 1) {
    std::vector<double> sq(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) sq[i] = (counts[i] - s.mean) * (counts[i] - s.mean);
    const double var = pairwise_sum(sq) / static_cast<double>(counts.size() - 1);
    s.std_error = std::sqrt(var / static_cast<double>(counts.size()));
  }
  return s;
}

struct KinematicEstimate {
  std::string p_descriptor;
  std::string q_descriptor;
  int n = 0;
  int samples = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double predicted = 0.0;
  std::optional<double> z_score;
  double excluded_fraction = 0.0;
  std::uint64_t master_seed = 0;
  double vol_p = 0.0;
  double vol_q = 0.0;
  double vol_p_gauge = 0.0;  // Richardson gauges of the two quadratures
  double vol_q_gauge = 0.0;
  CountSummary summary;
  std::vector<SampleRecord> records;
};

struct KinematicOptions {
  CountOptions count;
  int volume_grid = 64;
  int seed_table_grid = 64;  // deformed P with a level-set Q
  unsigned threads = 0;
  double max_excluded_fraction = 0.02;
  bool enforce_exclusion = true;  // throw TooManyExcluded
  std::function<void(const SampleRecord&)> on_sample;  // called as samples finish
};

/// Haar element g_i = to_special(haar_unitary(derive_stream(seed, i))).
inline UnitaryMatrix sample_group_element(int n, std::uint64_t master_seed, std::uint64_t i) {
  return to_special(haar_unitary(n + 1, derive_stream(master_seed, i)));
}

namespace detail {

inline std::string describe(const ParametricLagrangian& l) {
  std::string s = to_string(l.kind());
  if (l.base()) s += "(" + describe(*l.base()) + ")";
  return s;
}

// Counts #(g_i P ∩ Q) for i in [0, samples), preferring the level-set path.
inline std::vector<SampleRecord> run_samples(const ParametricLagrangian& p, const ParametricLagrangian& q,
                                             int samples, std::uint64_t master_seed, const KinematicOptions& opt) {
  const auto target = q.level_set();
  std::optional<SeedTable> table;
  if (target && p.kind() == ModelKind::Deformed) table = make_seed_table(p, opt.seed_table_grid, opt.threads);
  const bool rp_pair = p.kind() == ModelKind::RealProjective && q.kind() == ModelKind::RealProjective;
  std::vector<SampleRecord> records(static_cast<std::size_t>(samples));
  std::mutex mu;
  parallel_for(records.size(), opt.threads, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const UnitaryMatrix g = sample_group_element(p.n(), master_seed, i);
    SampleRecord rec;
    rec.index = i;
    IntersectionReport rep;
    try {
      rep = target ? count_levelset(p, *target, g, opt.count, table ? &*table : nullptr)
                   : count_parametric(p, q, g, opt.count);
    } catch (const Error& e) {
      rep.flag = IntersectionFlag::Failed;
      rep.diagnostics.note = e.what();
    }
    rec.count = rep.count;
    rec.min_sigma = rep.min_sigma;
    rec.flag = rep.flag;
    if (rp_pair) {
      const IntersectionReport oracle = rp_eigen_oracle(g, opt.count.sigma_min);
      rec.oracle_count = oracle.count;
      rec.oracle_distance = point_set_distance(oracle.points, rep.points);
      if (oracle.flag != IntersectionFlag::Clean && rec.flag == IntersectionFlag::Clean) rec.flag = oracle.flag;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records[i] = rec;
    if (opt.on_sample) {
      std::lock_guard<std::mutex> lock(mu);
      opt.on_sample(rec);
    }
  });
  return records;
}

}  // namespace detail

/// Monte Carlo mean of #(gP ∩ Q) over Haar g with the closed-form prediction from the
/// quadrature volumes. Non-transverse samples are excluded and tallied.
inline KinematicEstimate mc_estimate(const ParametricLagrangian& p, const ParametricLagrangian& q, int samples,
                                     std::uint64_t master_seed, const KinematicOptions& opt = {}) {
  require_same_size(p.n(), q.n(), "mc_estimate");
  if (samples < 30) throw Error(ErrorKind::InvalidArgument, "mc_estimate needs at least 30 samples");
  KinematicEstimate est;
  est.p_descriptor = detail::describe(p);
  est.q_descriptor = detail::describe(q);
  est.n = p.n();
  est.samples = samples;
  est.master_seed = master_seed;
  const VolumeEstimate vp = volume(p, opt.volume_grid, opt.threads);
  const VolumeEstimate vq = volume(q, opt.volume_grid, opt.threads);
  est.vol_p = vp.value;
  est.vol_q = vq.value;
  est.vol_p_gauge = vp.richardson_gauge;
  est.vol_q_gauge = vq.richardson_gauge;
  est.predicted = predicted_mean(est.vol_p, est.vol_q, p.n());
  est.records = detail::run_samples(p, q, samples, master_seed, opt);
  est.summary = summarize(est.records);
  est.mean = est.summary.mean;
  est.std_error = est.summary.std_error;
  est.excluded_fraction = est.summary.excluded_fraction;
  if (est.std_error > 0.0) est.z_score = (est.mean - est.predicted) / est.std_error;
  if (opt.enforce_exclusion && est.excluded_fraction > opt.max_excluded_fraction) {
    throw Error(ErrorKind::TooManyExcluded, "excluded fraction " + std::to_string(est.excluded_fraction));
  }
  return est;
}

struct SigmaConfiguration {
  std::string description;
  double mean = 0.0;
  double std_error = 0.0;
};

struct SigmaConstancyReport {
  int n = 0;
  int draws = 0;
  std::uint64_t master_seed = 0;
  std::vector<SigmaConfiguration> configurations;
  double max_pairwise_z = 0.0;
  std::optional<double> analytic;  // n = 1: E|sin phi| = 2/pi
  std::optional<double> analytic_z;
};

namespace detail {

// A random Lagrangian tangent plane: a random point of a random unitary image of the
// Clifford torus or of RP^n.
template <class Engine>
std::pair<HorizontalFrame, std::string> random_lagrangian_plane(int n, bool use_rp, Engine& eng) {
  const CMat u = haar_unitary_from(n + 1, eng);
  const ParametricLagrangian base = use_rp ? ParametricLagrangian::real_projective(n) : ParametricLagrangian::clifford(n);
  const ParametricLagrangian model = ParametricLagrangian::unitary_image(base, u);
  RVec params(model.param_dim());
  if (use_rp) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < params.size(); ++i) params(i) = normal(eng);
    params /= params.norm();
  } else {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (Eigen::Index i = 0; i < params.size(); ++i) params(i) = angle(eng);
  }
  return {model.frame(params), use_rp ? "rp" : "clifford"};
}

// Unitary carrying [from] to [to].
inline CMat mover(const ProjectivePoint& from, const ProjectivePoint& to) {
  return unitary_completion(to.z()) * unitary_completion(from.z()).adjoint();
}

inline SigmaConfiguration estimate_sigma(const HorizontalFrame& a, const HorizontalFrame& b, int draws,
                                         const SeedStream& stream, unsigned threads) {
  std::vector<double> values(static_cast<std::size_t>(draws));
  parallel_for(values.size(), threads, [&](std::size_t j) {
    const UnitaryMatrix k = stabilizer_sample(a.base(), stream.child(j));
    values[j] = sigma_aligned(a, transform(k.entries, b));
  });
  SigmaConfiguration c;
  c.mean = pairwise_sum(values) / draws;
  std::vector<double> sq(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) sq[j] = (values[j] - c.mean) * (values[j] - c.mean);
  c.std_error = std::sqrt(pairwise_sum(sq) / (draws - 1) / draws);
  return c;
}

}  // namespace detail

/// sigma(p, q) = E_k sigma(A, k B) for `pairs` random pairs of Lagrangian planes moved to
/// a common random base point; reports every mean and the largest pairwise z-score.
inline SigmaConstancyReport sigma_constancy_test(int n, int pairs, int draws, std::uint64_t master_seed,
                                                 unsigned threads = 0) {
  if (pairs < 3) throw Error(ErrorKind::InvalidArgument, "sigma_constancy_test needs at least 3 configurations");
  if (draws < 1000) throw Error(ErrorKind::InvalidArgument, "sigma_constancy_test needs at least 1000 draws");
  SigmaConstancyReport rep;
  rep.n = n;
  rep.draws = draws;
  rep.master_seed = master_seed;
  for (int i = 0; i < pairs; ++i) {
    const SeedStream s = derive_stream(master_seed, static_cast<std::uint64_t>(i));
    auto eng = s.engine();
    const bool a_rp = (i % 2) == 1;
    const bool b_rp = ((i / 2) % 2) == 1;
    auto [fa, na] = detail::random_lagrangian_plane(n, a_rp, eng);
    auto [fb, nb] = detail::random_lagrangian_plane(n, b_rp, eng);
    const CMat r_mover = haar_unitary_from(n + 1, eng);
    const ProjectivePoint r(r_mover.col(0));
    const HorizontalFrame a = transform(detail::mover(fa.base(), r), fa);
    const HorizontalFrame b = transform(detail::mover(fb.base(), r), fb);
    SigmaConfiguration c = detail::estimate_sigma(a, b, draws, s.child(0xC0FFEEULL), threads);
    c.description = na + ":" + nb;
    rep.configurations.push_back(c);
  }
  for (std::size_t i = 0; i < rep.configurations.size(); ++i) {
    for (std::size_t j = i + 1; j < rep.configurations.size(); ++j) {
      const auto& x = rep.configurations[i];
      const auto& y = rep.configurations[j];
      const double se = std::sqrt(x.std_error * x.std_error + y.std_error * y.std_error);
      if (se > 0.0) rep.max_pairwise_z = std::max(rep.max_pairwise_z, std::abs(x.mean - y.mean) / se);
    }
  }
  if (n == 1) {
    rep.analytic = 2.0 / kPi;
    double worst = 0.0;
    for (const auto& c : rep.configurations) {
      if (c.std_error > 0.0) worst = std::max(worst, std::abs(c.mean - *rep.analytic) / c.std_error);
    }
    rep.analytic_z = worst;
  }
  return rep;
}

struct ChoCheckReport {
  int n = 0;
  double time = 0.0;
  double step = 0.0;
  double lagrangian_defect = 0.0;  // max |omega| on a 20^n grid
  double vol_p = 0.0;
  double vol_p_gauge = 0.0;
  double vol_clifford = 0.0;
  double volume_ratio = 0.0;
  double a_n = 0.0;
  bool ratio_bound_holds = false;        // ratio >= a_n - 1e-6
  bool oh_conjecture_observed = false;   // vol(P) >= vol(L_n); reported, never asserted
  int cho_bound = 0;                     // 2^n
  bool count_bound_holds = false;        // every clean count >= 2^n
  KinematicEstimate estimate;            // (P, L_n) counts and the kinematic z-score
};

struct ChoOptions {
  KinematicOptions kinematic;
  double step = 1e-3;
  int defect_grid = 20;
};

/// Deforms L_n by the time-T flow of H, measures its volume, and counts #(gP ∩ L_n) for
/// Haar g.
inline ChoCheckReport cho_check(const HamiltonianSpec& h, double time, int samples, std::uint64_t master_seed,
                                const ChoOptions& opt = {}) {
  const int n = h.n();
  if (n != 2) throw Error(ErrorKind::InvalidArgument, "cho_check runs at n = 2");
  ChoCheckReport rep;
  rep.n = n;
  rep.time = time;
  rep.step = opt.step;
  const ParametricLagrangian clifford = ParametricLagrangian::clifford(n);
  const ParametricLagrangian p = deform_lagrangian(clifford, h, time, opt.step);
  rep.lagrangian_defect = lagrangian_defect(p, opt.defect_grid, opt.kinematic.threads);
  rep.estimate = mc_estimate(p, clifford, samples, master_seed, opt.kinematic);
  rep.vol_p = rep.estimate.vol_p;
  rep.vol_p_gauge = rep.estimate.vol_p_gauge;
  rep.vol_clifford = rep.estimate.vol_q;
  rep.volume_ratio = rep.vol_p / rep.vol_clifford;
  rep.a_n = lower_bound_and_a(n).a_n;
  rep.ratio_bound_holds = rep.volume_ratio >= rep.a_n - 1e-6;
  rep.oh_conjecture_observed = rep.vol_p >= rep.vol_clifford;
  rep.cho_bound = 1 << n;
  rep.count_bound_holds = rep.estimate.summary.clean == 0 || rep.estimate.summary.min_count >= rep.cho_bound;
  return rep;
}

}  // namespace cpgeom

#endif  // CPGEOM_KINEMATIC_HPP
