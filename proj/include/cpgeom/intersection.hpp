#ifndef CPGEOM_INTERSECTION_HPP
#define CPGEOM_INTERSECTION_HPP

// Transverse intersection counts #(gP ∩ Q).
//
// Orientation: every method counts points of g·P ∩ Q and reports them as points of CP^n.
// The level-set path parametrizes P, applies g, and tests membership in Q.

#include "lagrangian.hpp"
#include "random_unitary.hpp"

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cpgeom {

enum class IntersectionFlag { Clean, NearDegenerate, Failed };
enum class CountMethod { Parametric, LevelSet, EigenOracle };

inline const char* to_string(IntersectionFlag f) {
  switch (f) {
    case IntersectionFlag::Clean: return "clean";
    case IntersectionFlag::NearDegenerate: return "near_degenerate";
    case IntersectionFlag::Failed: return "failed";
  }
  return "unknown";
}

inline const char* to_string(CountMethod m) {
  switch (m) {
    case CountMethod::Parametric: return "parametric";
    case CountMethod::LevelSet: return "levelset";
    case CountMethod::EigenOracle: return "eigen_oracle";
  }
  return "unknown";
}

struct CountDiagnostics {
  int seeds_tried = 0;
  int converged = 0;
  int stalled = 0;          // positive local minima, discarded
  int near_misses = 0;      // stalled between the acceptance and discard thresholds
  int budget_exceeded = 0;  // ConvergenceBudgetExceeded: seed discarded
  int frame_failures = 0;
  std::vector<int> iteration_histogram;  // converged seeds by iteration count
  std::string note;
};

struct IntersectionReport {
  int count = 0;
  std::vector<ProjectivePoint> points;  // gauge-fixed, deduplicated, sorted
  std::vector<double> sigmas;           // sigma_angle of the two tangent planes per point
  std::optional<double> min_sigma;
  IntersectionFlag flag = IntersectionFlag::Clean;
  CountMethod method = CountMethod::Parametric;
  CountDiagnostics diagnostics;
};

struct CountOptions {
  int grid = 0;                        // seeds per axis; 0 picks the default for the method
  double accept_gap = 1e-16;           // parametric: chordal gap accepted as a zero
  double accept_residual = 1e-11;      // level set: residual norm accepted as a zero
  double discard_gap = 1e-10;          // stalls above this are not intersections
  double dedupe_radius = 1e-6;         // fs_distance merge radius
  double sigma_min = 1e-4;             // transversality gate
  int max_iterations = 60;
  int max_halvings = 6;
};

/// Default seed grids: 48 (n = 1) / 24 (n >= 2) per axis for the 2n-dimensional
/// parametric search, 64 per axis (n <= 2) for the n-dimensional level-set search.
inline int default_grid(CountMethod m, int n) {
  if (m == CountMethod::Parametric) return n == 1 ? 48 : (n == 2 ? 24 : 12);
  return n <= 2 ? 64 : 16;
}

/// Chart values of P on its seed grid, for models whose chart is expensive (deformed
/// tori). Reused across group elements g.
struct SeedTable {
  int grid = 0;
  std::vector<RVec> params;
  std::vector<ProjectivePoint> points;
};

inline SeedTable make_seed_table(const ParametricLagrangian& p, int grid, unsigned threads = 1) {
  SeedTable t;
  t.grid = grid;
  t.params = p.seed_grid(grid);
  t.points.resize(t.params.size());
  parallel_for(t.params.size(), threads, [&](std::size_t i) { t.points[i] = p.chart(t.params[i]); });
  return t;
}

namespace detail {

struct Candidate {
  ProjectivePoint point;  // gauge-fixed
  RVec p_params;
  RVec q_params;
};

// Merge accepted zeros by image point (first seed wins), then order canonically.
inline std::vector<Candidate> dedupe(const std::vector<Candidate>& accepted, double radius) {
  std::vector<Candidate> reps;
  for (const auto& c : accepted) {
    bool merged = false;
    for (const auto& r : reps) {
      if (fs_distance(r.point, c.point) < radius) {
        merged = true;
        break;
      }
    }
    if (!merged) reps.push_back(c);
  }
  std::sort(reps.begin(), reps.end(), [](const Candidate& a, const Candidate& b) {
    const CVec& x = a.point.z();
    const CVec& y = b.point.z();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x(i).real() != y(i).real()) return x(i).real() < y(i).real();
      if (x(i).imag() != y(i).imag()) return x(i).imag() < y(i).imag();
    }
    return false;
  });
  return reps;
}

inline void finalize(IntersectionReport& rep, const std::vector<Candidate>& reps, double sigma_min,
                     const std::function<double(const Candidate&)>& sigma_of) {
  rep.count = static_cast<int>(reps.size());
  rep.points.clear();
  rep.sigmas.clear();
  for (const auto& c : reps) {
    rep.points.push_back(c.point);
    rep.sigmas.push_back(sigma_of(c));
  }
  if (!rep.sigmas.empty()) rep.min_sigma = *std::min_element(rep.sigmas.begin(), rep.sigmas.end());
  if (rep.flag == IntersectionFlag::Clean && rep.min_sigma && *rep.min_sigma < sigma_min) {
    rep.flag = IntersectionFlag::NearDegenerate;
  }
}

inline RVec solve_step(const RMat& jac, const RVec& rhs) {
  if (jac.rows() == jac.cols()) return jac.partialPivLu().solve(rhs);
  return jac.colPivHouseholderQr().solve(rhs);
}

enum class SeedOutcome { Converged, Stalled, NearMiss, Budget, FrameFailure };

struct NewtonResult {
  SeedOutcome outcome = SeedOutcome::Stalled;
  int iterations = 0;
};

// Damped Newton / Gauss-Newton on a residual r(x) with step halving. `eval` fills the
// residual and, when asked, the Jacobian; `retract` moves along a tangent step.
template <class Eval, class Retract>
NewtonResult damped_newton(RVec& x, Eval&& eval, Retract&& retract, double converge, double accept, double discard,
                           const CountOptions& opt) {
  RVec r;
  RMat jac;
  NewtonResult out;
  auto settle = [&](double norm) {
    if (norm <= accept) return SeedOutcome::Converged;
    return norm <= discard ? SeedOutcome::NearMiss : SeedOutcome::Stalled;
  };
  try {
    eval(x, r, &jac);
    double norm = r.norm();
    for (int it = 0; it < opt.max_iterations; ++it) {
      out.iterations = it;
      if (norm <= converge) {
        out.outcome = SeedOutcome::Converged;
        return out;
      }
      const RVec step = solve_step(jac, -r);
      bool improved = false;
      if (step.allFinite()) {
        double lambda = 1.0;
        for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
          const RVec trial = retract(x, lambda * step);
          RVec r_trial;
          eval(trial, r_trial, nullptr);
          const double n_trial = r_trial.norm();
          if (n_trial < norm) {
            x = trial;
            norm = n_trial;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        out.outcome = settle(norm);
        return out;
      }
      eval(x, r, &jac);
    }
    out.iterations = opt.max_iterations;
    out.outcome = norm <= converge ? SeedOutcome::Converged : SeedOutcome::Budget;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateFrame && e.kind() != ErrorKind::StepTooLarge) throw;
    out.outcome = SeedOutcome::FrameFailure;
  }
  return out;
}

inline void record(CountDiagnostics& d, const NewtonResult& r, int max_iterations) {
  ++d.seeds_tried;
  switch (r.outcome) {
    case SeedOutcome::Converged:
      ++d.converged;
      if (d.iteration_histogram.empty()) d.iteration_histogram.assign(max_iterations + 1, 0);
      ++d.iteration_histogram[std::min(r.iterations, max_iterations)];
      break;
    case SeedOutcome::Stalled: ++d.stalled; break;
    case SeedOutcome::NearMiss: ++d.near_misses; break;
    case SeedOutcome::Budget: ++d.budget_exceeded; break;
    case SeedOutcome::FrameFailure: ++d.frame_failures; break;
  }
}

inline RVec concat(const RVec& a, const RVec& b) {
  RVec out(a.size() + b.size());
  out << a, b;
  return out;
}

// Node indices of the 3^n neighbourhood (periodic) of `idx` on a grid^n torus grid.
inline std::vector<std::size_t> torus_neighbourhood(std::size_t idx, int grid, int n) {
  std::vector<int> coord(n);
  std::size_t rest = idx;
  for (int k = 0; k < n; ++k) {
    coord[k] = static_cast<int>(rest % grid);
    rest /= grid;
  }
  std::size_t combos = 1;
  for (int k = 0; k < n; ++k) combos *= 3;
  std::vector<std::size_t> out;
  out.reserve(combos);
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t code = c;
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (int k = 0; k < n; ++k) {
      const int off = static_cast<int>(code % 3) - 1;
      code /= 3;
      const int j = ((coord[k] + off) % grid + grid) % grid;
      flat += static_cast<std::size_t>(j) * stride;
      stride *= static_cast<std::size_t>(grid);
    }
    out.push_back(flat);
  }
  return out;
}

}  // namespace detail

/// Minimizes chordal_gap(g P.chart(theta), Q.chart(phi)) by damped Gauss-Newton from every
/// node of the product seed grid. The residual is the horizontal part of Q.chart(phi)
/// at g P.chart(theta), whose squared norm is the chordal gap.
inline IntersectionReport count_parametric(const ParametricLagrangian& p, const ParametricLagrangian& q,
                                           const UnitaryMatrix& g, const CountOptions& options = {}) {
  require_same_size(p.n(), q.n(), "count_parametric");
  require_same_size(p.n() + 1, g.dim(), "count_parametric");
  const int n = p.n();
  const int grid = options.grid > 0 ? options.grid : default_grid(CountMethod::Parametric, n);
  if (grid < 12) throw Error(ErrorKind::InvalidArgument, "parametric seed grid must be >= 12 per axis");
  IntersectionReport rep;
  rep.method = CountMethod::Parametric;

  const int dp = p.param_dim();
  const CMat& gm = g.entries;

  auto eval = [&](const RVec& x, RVec& r, RMat* jac) {
    const RVec th = x.head(dp);
    const RVec ph = x.tail(x.size() - dp);
    const ProjectivePoint a = transform(gm, p.chart(th));
    const ProjectivePoint b = q.chart(ph);
    const cplx ab = hdot(a.z(), b.z());
    const CVec res = b.z() - ab * a.z();
    r = realify(res);
    if (jac) {
      const HorizontalFrame fp = transform(gm, p.frame(th));
      const HorizontalFrame fq = q.frame(ph);
      jac->resize(r.size(), 2 * n);
      for (int k = 0; k < n; ++k) {
        const CVec da = fp.vectors().col(k);
        const CVec d = -(hdot(da, b.z()) * a.z() + ab * da);
        jac->col(k) = realify(d);
      }
      for (int k = 0; k < n; ++k) {
        const CVec db = fq.vectors().col(k);
        const CVec d = db - hdot(a.z(), db) * a.z();
        jac->col(n + k) = realify(d);
      }
    }
  };
  auto retract = [&](const RVec& x, const RVec& s) {
    return detail::concat(p.retract(x.head(dp), s.head(n)), q.retract(x.tail(x.size() - dp), s.tail(n)));
  };

  const auto seeds_p = p.seed_grid(grid);
  const auto seeds_q = q.seed_grid(grid);
  std::vector<detail::Candidate> accepted;
  for (const auto& sp : seeds_p) {
    for (const auto& sq : seeds_q) {
      RVec x = detail::concat(sp, sq);
      const auto res = detail::damped_newton(x, eval, retract, 1e-15, std::sqrt(options.accept_gap),
                                             std::sqrt(options.discard_gap), options);
      detail::record(rep.diagnostics, res, options.max_iterations);
      if (res.outcome != detail::SeedOutcome::Converged) continue;
      const RVec th = x.head(dp);
      accepted.push_back({gauge_fix(transform(gm, p.chart(th))), th, x.tail(x.size() - dp)});
    }
  }
  const auto reps = detail::dedupe(accepted, options.dedupe_radius);
  detail::finalize(rep, reps, options.sigma_min, [&](const detail::Candidate& c) {
    return detail::sigma_aligned(transform(gm, p.frame(c.p_params)), q.frame(c.q_params));
  });
  return rep;
}

/// Solves target_residual(g P.chart(theta)) = 0 by Newton (square Clifford case) or
/// Gauss-Newton (RP^n). With a seed table, Newton starts only from the 3^n
/// neighbourhoods of grid-local minima of |residual| (torus domains); otherwise from
/// every grid node.
inline IntersectionReport count_levelset(const ParametricLagrangian& p, const LevelSetResidual& target,
                                         const UnitaryMatrix& g, const CountOptions& options = {},
                                         const SeedTable* table = nullptr) {
  require_same_size(p.n(), target.n, "count_levelset");
  require_same_size(p.n() + 1, g.dim(), "count_levelset");
  const int n = p.n();
  IntersectionReport rep;
  rep.method = CountMethod::LevelSet;
  const CMat& gm = g.entries;
  const ParametricLagrangian q = target.target == ModelKind::Clifford ? ParametricLagrangian::clifford(n)
                                                                      : ParametricLagrangian::real_projective(n);

  auto eval = [&](const RVec& th, RVec& r, RMat* jac) {
    if (jac) {
      const HorizontalFrame f = transform(gm, p.frame(th));
      r = membership_residual(target, f.base());
      *jac = membership_jacobian(target, f.base(), f.vectors());
    } else {
      r = membership_residual(target, transform(gm, p.chart(th)));
    }
  };
  auto retract = [&](const RVec& x, const RVec& s) { return p.retract(x, s); };

  std::vector<RVec> seeds;
  if (table) {
    if (p.domain() != ParamDomain::Torus) {
      throw Error(ErrorKind::InvalidArgument, "seed screening needs a torus parameter domain");
    }
    const std::size_t total = table->points.size();
    std::vector<double> level(total);
    for (std::size_t i = 0; i < total; ++i) level[i] = membership_residual(target, transform(gm, table->points[i])).norm();
    std::vector<char> chosen(total, 0);
    for (std::size_t i = 0; i < total; ++i) {
      const auto hood = detail::torus_neighbourhood(i, table->grid, n);
      bool is_min = true;
      for (auto j : hood) {
        if (level[j] < level[i]) {
          is_min = false;
          break;
        }
      }
      if (!is_min) continue;
      for (auto j : hood) chosen[j] = 1;
    }
    for (std::size_t i = 0; i < total; ++i) {
      if (chosen[i]) seeds.push_back(table->params[i]);
    }
  } else {
    const int grid = options.grid > 0 ? options.grid : default_grid(CountMethod::LevelSet, n);
    if (grid < 12) throw Error(ErrorKind::InvalidArgument, "level-set seed grid must be >= 12 per axis");
    seeds = p.seed_grid(grid);
  }

  std::vector<detail::Candidate> accepted;
  for (const auto& s : seeds) {
    RVec th = s;
    const auto res = detail::damped_newton(th, eval, retract, 1e-14, options.accept_residual,
                                           std::sqrt(options.discard_gap), options);
    detail::record(rep.diagnostics, res, options.max_iterations);
    if (res.outcome != detail::SeedOutcome::Converged) continue;
    const ProjectivePoint w = gauge_fix(transform(gm, p.chart(th)));
    accepted.push_back({w, th, *q.locate(w)});
  }
  const auto reps = detail::dedupe(accepted, options.dedupe_radius);
  detail::finalize(rep, reps, options.sigma_min, [&](const detail::Candidate& c) {
    return detail::sigma_aligned(transform(gm, p.frame(c.p_params)), q.frame(c.q_params));
  });
  return rep;
}

/// gRP^n ∩ RP^n by linear algebra: with M = g^T g, a real eigenvector y of M gives the
/// intersection point [g y]. Spectra with a gap below 1e-8 are flagged (non-transverse).
inline IntersectionReport rp_eigen_oracle(const UnitaryMatrix& g, double sigma_min = 1e-4) {
  const auto m = g.dim();
  const int n = static_cast<int>(m) - 1;
  IntersectionReport rep;
  rep.method = CountMethod::EigenOracle;
  const CMat sym = g.entries.transpose() * g.entries;
  Eigen::ComplexEigenSolver<CMat> es(sym);
  const auto& w = es.eigenvalues();
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) gap = std::min(gap, std::abs(w(i) - w(j)));
  }
  if (gap < 1e-8) {
    rep.flag = IntersectionFlag::NearDegenerate;
    rep.diagnostics.note = "DegenerateSpectrum: eigenvalue gap " + std::to_string(gap);
    return rep;
  }
  const ParametricLagrangian rp = ParametricLagrangian::real_projective(n);
  std::vector<detail::Candidate> found;
  for (Eigen::Index k = 0; k < m; ++k) {
    CVec v = es.eigenvectors().col(k);
    v /= v.norm();
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    v *= std::conj(v(big)) / std::abs(v(big));
    if (v.imag().norm() > 1e-8) {
      rep.flag = IntersectionFlag::Failed;
      rep.diagnostics.note = "eigenvector admits no real representative";
      return rep;
    }
    RVec y = v.real();
    y /= y.norm();
    const ProjectivePoint x = gauge_fix(transform(g.entries, ProjectivePoint(y.cast<cplx>())));
    found.push_back({x, y, *rp.locate(x)});
  }
  rep.diagnostics.seeds_tried = static_cast<int>(m);
  rep.diagnostics.converged = static_cast<int>(m);
  const auto reps = detail::dedupe(found, 1e-6);
  detail::finalize(rep, reps, sigma_min, [&](const detail::Candidate& c) {
    return detail::sigma_aligned(transform(g.entries, rp.frame(c.p_params)), rp.frame(c.q_params));
  });
  return rep;
}

/// Largest distance from a point of `a` to its nearest point in `b` (infinity when the
/// counts differ).
inline double point_set_distance(const std::vector<ProjectivePoint>& a, const std::vector<ProjectivePoint>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : b) best = std::min(best, fs_distance(x, y));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace cpgeom

#endif  // CPGEOM_INTERSECTION_HPP
