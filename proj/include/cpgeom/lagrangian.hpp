#ifndef CPGEOM_LAGRANGIAN_HPP
#define CPGEOM_LAGRANGIAN_HPP

// Lagrangian submanifolds of CP^n exposed as parametric charts with horizontal tangent
// frames: the Clifford torus, RP^n, unitary images and Hamiltonian deformations.
//
// Parameter domains:
//   torus kinds  - theta in R^n, read mod 2pi; tangent basis is the identity.
//   RP^n         - x on the unit sphere S^n in R^{n+1}, antipodes identified; steps are
//                  taken along an orthonormal basis of x^perp and retracted to S^n.

#include "hamiltonian.hpp"
#include "projective.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace cpgeom {

enum class ModelKind { Clifford, RealProjective, UnitaryImage, Deformed };
enum class ParamDomain { Torus, Sphere };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Clifford: return "clifford";
    case ModelKind::RealProjective: return "rp";
    case ModelKind::UnitaryImage: return "unitary_image";
    case ModelKind::Deformed: return "deformed";
  }
  return "unknown";
}

/// (e^{i theta_1}, ..., e^{i theta_n}, 1) / sqrt(n+1); injective on T^n onto L_n.
inline ProjectivePoint clifford_chart(const RVec& theta) {
  const auto n = theta.size();
  CVec z(n + 1);
  const double s = 1.0 / std::sqrt(static_cast<double>(n + 1));
  for (Eigen::Index k = 0; k < n; ++k) z(k) = std::polar(s, theta(k));
  z(n) = s;
  return ProjectivePoint(z);
}

/// A real unit vector viewed as a point of RP^n in CP^n.
inline ProjectivePoint rp_chart(const RVec& x) {
  if (std::abs(x.norm() - 1.0) > 1e-10) {
    throw Error(ErrorKind::NotUnit, "rp_chart expects a unit vector, norm " + std::to_string(x.norm()));
  }
  return ProjectivePoint(x.cast<cplx>());
}

/// Hyperspherical coordinates phi_1..phi_{n-1} in [0, pi], phi_n in [0, 2pi) to S^n,
/// together with the Jacobian d x / d phi (columns).
inline std::pair<RVec, RMat> sphere_angles(const RVec& phi) {
  const auto n = phi.size();
  RVec x(n + 1);
  RMat jac = RMat::Zero(n + 1, n);
  double prefix = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = prefix * std::cos(phi(i));
    prefix *= std::sin(phi(i));
  }
  x(n) = prefix;
  for (Eigen::Index i = 0; i <= n; ++i) {
    for (Eigen::Index k = 0; k < n && k <= i; ++k) {
      double d = 1.0;
      for (Eigen::Index j = 0; j < std::min(i, n); ++j) d *= (j == k) ? std::cos(phi(j)) : std::sin(phi(j));
      if (i < n) d *= (k == i) ? -std::sin(phi(i)) : std::cos(phi(i));
      jac(i, k) = d;
    }
  }
  return {x, jac};
}

/// Zero-set description of Clifford (|z_k|^2 - |z_{k+1}|^2, arity n) or RP^n
/// (Im(z_i conj z_j) for i < j, arity n(n+1)/2).
struct LevelSetResidual {
  ModelKind target = ModelKind::Clifford;
  int n = 1;

  int arity() const { return target == ModelKind::Clifford ? n : n * (n + 1) / 2; }
};

inline RVec membership_residual(const LevelSetResidual& kind, const ProjectivePoint& p) {
  require_same_size(kind.n + 1, p.ambient(), "membership_residual");
  const CVec& z = p.z();
  RVec r(kind.arity());
  if (kind.target == ModelKind::Clifford) {
    for (int k = 0; k < kind.n; ++k) r(k) = std::norm(z(k)) - std::norm(z(k + 1));
  } else {
    int row = 0;
    for (int i = 0; i <= kind.n; ++i) {
      for (int j = i + 1; j <= kind.n; ++j) r(row++) = std::imag(z(i) * std::conj(z(j)));
    }
  }
  return r;
}

/// Derivative of membership_residual at p along the columns of `tangents`.
inline RMat membership_jacobian(const LevelSetResidual& kind, const ProjectivePoint& p, const CMat& tangents) {
  const CVec& z = p.z();
  RMat jac(kind.arity(), tangents.cols());
  for (Eigen::Index c = 0; c < tangents.cols(); ++c) {
    const auto dz = tangents.col(c);
    if (kind.target == ModelKind::Clifford) {
      for (int k = 0; k < kind.n; ++k) {
        jac(k, c) = 2.0 * std::real(std::conj(z(k)) * dz(k)) - 2.0 * std::real(std::conj(z(k + 1)) * dz(k + 1));
      }
    } else {
      int row = 0;
      for (int i = 0; i <= kind.n; ++i) {
        for (int j = i + 1; j <= kind.n; ++j) {
          jac(row++, c) = std::imag(dz(i) * std::conj(z(j)) + z(i) * std::conj(dz(j)));
        }
      }
    }
  }
  return jac;
}

inline constexpr double kFrameFdStep = 1e-5;
inline constexpr double kMinFrameGram = 1e-10;

class ParametricLagrangian {
 public:
  static ParametricLagrangian clifford(int n) {
    check_n(n);
    ParametricLagrangian l;
    l.kind_ = ModelKind::Clifford;
    l.n_ = n;
    return l;
  }

  static ParametricLagrangian real_projective(int n) {
    check_n(n);
    ParametricLagrangian l;
    l.kind_ = ModelKind::RealProjective;
    l.n_ = n;
    return l;
  }

  static ParametricLagrangian unitary_image(const ParametricLagrangian& base, const CMat& u) {
    require_same_size(base.n_ + 1, u.rows(), "unitary_image");
    require_same_size(base.n_ + 1, u.cols(), "unitary_image");
    if (unitarity_defect_of(u) > 1e-10) throw Error(ErrorKind::InvalidArgument, "unitary_image: matrix not unitary");
    ParametricLagrangian l;
    l.kind_ = ModelKind::UnitaryImage;
    l.n_ = base.n_;
    l.base_ = std::make_shared<const ParametricLagrangian>(base);
    l.unitary_ = u;
    return l;
  }

  /// Chart theta -> flow_T(base.chart(theta)). The base must be a torus kind.
  static ParametricLagrangian deformed(const ParametricLagrangian& base, const HamiltonianSpec& h, double time,
                                       double step) {
    require_same_size(base.n_ + 1, h.ambient(), "deformed");
    if (base.domain() != ParamDomain::Torus) {
      throw Error(ErrorKind::InvalidArgument, "deformations are defined for Clifford-type bases only");
    }
    if (!(step > 0.0) || step > kMaxFlowStep * (1.0 + 1e-12)) {
      throw Error(ErrorKind::StepTooLarge, "flow step " + std::to_string(step) + " outside (0, 1e-2]");
    }
    ParametricLagrangian l;
    l.kind_ = ModelKind::Deformed;
    l.n_ = base.n_;
    l.base_ = std::make_shared<const ParametricLagrangian>(base);
    l.hamiltonian_ = std::make_shared<const HamiltonianSpec>(h);
    l.time_ = time;
    l.step_ = step;
    return l;
  }

  ModelKind kind() const { return kind_; }
  int n() const { return n_; }
  const ParametricLagrangian* base() const { return base_.get(); }
  const CMat& unitary() const { return unitary_; }
  const HamiltonianSpec* hamiltonian() const { return hamiltonian_.get(); }
  double time() const { return time_; }
  double step() const { return step_; }

  ParamDomain domain() const {
    switch (kind_) {
      case ModelKind::Clifford: return ParamDomain::Torus;
      case ModelKind::RealProjective: return ParamDomain::Sphere;
      default: return base_->domain();
    }
  }

  /// Number of coordinates of a parameter vector (n on the torus, n + 1 on the sphere).
  int param_dim() const { return domain() == ParamDomain::Torus ? n_ : n_ + 1; }

  /// The zero-set description of this model, when it has one.
  std::optional<LevelSetResidual> level_set() const {
    if (kind_ == ModelKind::Clifford || kind_ == ModelKind::RealProjective) return LevelSetResidual{kind_, n_};
    return std::nullopt;
  }

  /// Orthonormal basis (columns) of the parameter tangent space at `params`.
  RMat tangent_basis(const RVec& params) const {
    if (domain() == ParamDomain::Torus) return RMat::Identity(n_, n_);
    RMat col = params;
    Eigen::HouseholderQR<RMat> qr(col);
    RMat q = qr.householderQ();
    return q.rightCols(n_);
  }

  /// Move from `params` by `step` (coordinates in tangent_basis(params)).
  RVec retract(const RVec& params, const RVec& step) const {
    if (domain() == ParamDomain::Torus) return params + step;
    RVec x = params + tangent_basis(params) * step;
    return x / x.norm();
  }

  ProjectivePoint chart(const RVec& params) const {
    require_same_size(param_dim(), params.size(), "chart");
    switch (kind_) {
      case ModelKind::Clifford: return clifford_chart(params);
      case ModelKind::RealProjective: return ProjectivePoint((params / params.norm()).cast<cplx>());
      case ModelKind::UnitaryImage: return transform(unitary_, base_->chart(params));
      case ModelKind::Deformed: return flow_point(*hamiltonian_, base_->chart(params), time_, step_);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model kind");
  }

  /// Horizontal frame of the image tangent space at chart(params), along tangent_basis.
  HorizontalFrame frame(const RVec& params) const {
    require_same_size(param_dim(), params.size(), "frame");
    HorizontalFrame f = raw_frame(params);
    const RMat g = f.gram();
    const double det = g.determinant();
    if (!(det >= kMinFrameGram)) {
      throw Error(ErrorKind::DegenerateFrame, "real Gram determinant " + std::to_string(det));
    }
    return f;
  }

  /// Inverse chart for Clifford and RP^n (the point must lie on the model).
  std::optional<RVec> locate(const ProjectivePoint& p) const {
    require_same_size(n_ + 1, p.ambient(), "locate");
    const CVec& z = p.z();
    if (kind_ == ModelKind::Clifford) {
      RVec theta(n_);
      for (int k = 0; k < n_; ++k) theta(k) = std::arg(z(k) / z(n_));
      return theta;
    }
    if (kind_ == ModelKind::RealProjective) {
      const ProjectivePoint g = gauge_fix(p);
      RVec x = g.z().real();
      return RVec(x / x.norm());
    }
    return std::nullopt;
  }

  /// Seed parameters on a uniform grid with `per_axis` nodes per coordinate axis
  /// (hyperspherical angles on the sphere).
  std::vector<RVec> seed_grid(int per_axis) const {
    std::vector<RVec> out;
    if (per_axis < 1) throw Error(ErrorKind::InvalidArgument, "seed grid must be positive");
    std::size_t total = 1;
    for (int k = 0; k < n_; ++k) total *= static_cast<std::size_t>(per_axis);
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      RVec a(n_);
      for (int k = 0; k < n_; ++k) {
        const auto j = static_cast<double>(rest % per_axis);
        rest /= per_axis;
        a(k) = j;
      }
      if (domain() == ParamDomain::Torus) {
        out.push_back(a * (2.0 * kPi / per_axis));
      } else {
        RVec phi(n_);
        for (int k = 0; k < n_; ++k) {
          const double span = (k + 1 == n_) ? 2.0 * kPi : kPi;
          phi(k) = (a(k) + 0.5) * span / per_axis;
        }
        out.push_back(sphere_angles(phi).first);
      }
    }
    return out;
  }

 private:
  ParametricLagrangian() = default;

  static void check_n(int n) {
    if (n < 1 || n + 1 > kMaxAmbient) {
      throw Error(ErrorKind::InvalidArgument, "projective dimension " + std::to_string(n) + " unsupported");
    }
  }

  static double unitarity_defect_of(const CMat& u) {
    return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  }

  HorizontalFrame raw_frame(const RVec& params) const {
    switch (kind_) {
      case ModelKind::Clifford: {
        const ProjectivePoint p = clifford_chart(params);
        CMat d = CMat::Zero(n_ + 1, n_);
        for (int k = 0; k < n_; ++k) d(k, k) = cplx(0.0, 1.0) * p.z()(k);
        return HorizontalFrame(p, d, 0.0);
      }
      case ModelKind::RealProjective: {
        const RVec x = params / params.norm();
        const RMat basis = tangent_basis(x);
        return HorizontalFrame(ProjectivePoint(x.cast<cplx>()), basis.cast<cplx>(), 0.0);
      }
      case ModelKind::UnitaryImage: return transform(unitary_, base_->raw_frame(params));
      case ModelKind::Deformed: {
        const ProjectivePoint center = chart(params);
        CMat d(n_ + 1, n_);
        for (int k = 0; k < n_; ++k) {
          const RVec e = RVec::Unit(n_, k) * kFrameFdStep;
          const CVec plus = chart(base_->retract(params, e)).z();
          const CVec minus = chart(base_->retract(params, -e)).z();
          d.col(k) = (plus - minus) / (2.0 * kFrameFdStep);
        }
        return HorizontalFrame(center, d, 0.0);
      }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model kind");
  }

  ModelKind kind_ = ModelKind::Clifford;
  int n_ = 1;
  std::shared_ptr<const ParametricLagrangian> base_;
  CMat unitary_;
  std::shared_ptr<const HamiltonianSpec> hamiltonian_;
  double time_ = 0.0;
  double step_ = 1e-3;
};

/// Largest |omega(u_i, u_j)| over the frames at the seed grid nodes.
inline double lagrangian_defect(const ParametricLagrangian& l, int per_axis, unsigned threads = 0) {
  const auto params = l.seed_grid(per_axis);
  std::vector<double> worst(params.size(), 0.0);
  parallel_for(params.size(), threads, [&](std::size_t i) {
    const HorizontalFrame f = l.frame(params[i]);
    double w = 0.0;
    for (Eigen::Index a = 0; a < f.size(); ++a) {
      for (Eigen::Index b = a + 1; b < f.size(); ++b) {
        w = std::max(w, std::abs(symplectic_pairing(f.base(), f.vectors().col(a), f.vectors().col(b))));
      }
    }
    worst[i] = w;
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

struct VolumeEstimate {
  double value = 0.0;             // Richardson-extrapolated
  double coarse = 0.0;            // midpoint rule at grid
  double fine = 0.0;              // midpoint rule at 2 * grid
  double richardson_gauge = 0.0;  // |fine - coarse|
  double integrand_stddev = 0.0;  // spread of sqrt(det G) on the fine grid
  int grid = 0;
};

namespace detail {

struct MidpointResult {
  double value = 0.0;
  double stddev = 0.0;
};

inline MidpointResult midpoint_volume(const ParametricLagrangian& l, int per_axis, unsigned threads) {
  const int n = l.n();
  const bool sphere = l.domain() == ParamDomain::Sphere;
  std::size_t total = 1;
  double cell = 1.0;
  for (int k = 0; k < n; ++k) {
    total *= static_cast<std::size_t>(per_axis);
    cell *= ((!sphere || k + 1 == n) ? 2.0 * kPi : kPi) / per_axis;
  }
  std::vector<double> density(total);
  parallel_for(total, threads, [&](std::size_t idx) {
    std::size_t rest = idx;
    RVec t(n);
    for (int k = 0; k < n; ++k) {
      const auto j = static_cast<double>(rest % per_axis);
      rest /= per_axis;
      const double span = (!sphere || k + 1 == n) ? 2.0 * kPi : kPi;
      t(k) = (j + 0.5) * span / per_axis;
    }
    if (sphere) {
      // Pull the model frame back through the hyperspherical angle chart of S^n.
      auto [x, jac] = sphere_angles(t);
      const RMat coords = l.tangent_basis(x).transpose() * jac;
      const RMat g = coords.transpose() * l.frame(x).gram() * coords;
      density[idx] = std::sqrt(std::max(0.0, g.determinant()));
    } else {
      density[idx] = std::sqrt(std::max(0.0, l.frame(t).gram().determinant()));
    }
  });
  const double sum = pairwise_sum(density);
  const double mean = sum / static_cast<double>(total);
  std::vector<double> sq(total);
  for (std::size_t i = 0; i < total; ++i) sq[i] = (density[i] - mean) * (density[i] - mean);
  MidpointResult out;
  out.value = sum * cell * (sphere ? 0.5 : 1.0);
  out.stddev = std::sqrt(pairwise_sum(sq) / static_cast<double>(total));
  return out;
}

}  // namespace detail

/// Riemannian volume by the composite midpoint rule on `grid` and `2 * grid` nodes per
/// axis, Richardson-extrapolated. RP^n integrates over S^n and halves.
inline VolumeEstimate volume(const ParametricLagrangian& l, int grid, unsigned threads = 0) {
  if (grid < 8) throw Error(ErrorKind::InvalidArgument, "volume grid must be >= 8 per axis");
  const auto coarse = detail::midpoint_volume(l, grid, threads);
  const auto fine = detail::midpoint_volume(l, 2 * grid, threads);
  VolumeEstimate v;
  v.coarse = coarse.value;
  v.fine = fine.value;
  v.value = fine.value + (fine.value - coarse.value) / 3.0;
  v.richardson_gauge = std::abs(fine.value - coarse.value);
  v.integrand_stddev = fine.stddev;
  v.grid = grid;
  return v;
}

}  // namespace cpgeom

#endif  // CPGEOM_LAGRANGIAN_HPP
