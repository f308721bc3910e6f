#ifndef CPGEOM_HAMILTONIAN_HPP
#define CPGEOM_HAMILTONIAN_HPP

// S^1-invariant Hamiltonians on CP^n built from normalized Hermitian quadratic forms,
//   H([z]) = sum_t c_t prod_f (z^* A_f z) / (z^* z),
// their Hamiltonian vector fields and RK4 flows on the sphere lift.

#include "projective.hpp"

#include <cmath>
#include <vector>

namespace cpgeom {

inline constexpr std::size_t kMaxFactors = 8;

struct HamiltonianTerm {
  double coefficient = 0.0;
  std::vector<CMat> factors;
};

class HamiltonianSpec {
 public:
  HamiltonianSpec() = default;

  /// An empty spec is the zero Hamiltonian on C^{ambient}.
  HamiltonianSpec(int ambient, std::vector<HamiltonianTerm> terms) : ambient_(ambient), terms_(std::move(terms)) {
    if (ambient < 2 || ambient > kMaxAmbient) {
      throw Error(ErrorKind::InvalidArgument, "Hamiltonian ambient dimension " + std::to_string(ambient));
    }
    for (const auto& t : terms_) {
      if (!std::isfinite(t.coefficient)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
      if (t.factors.size() > kMaxFactors) throw Error(ErrorKind::InvalidArgument, "more than 8 factors in a term");
      for (const auto& a : t.factors) {
        if (a.rows() != ambient || a.cols() != ambient) {
          throw Error(ErrorKind::DimensionMismatch, "Hamiltonian factor is not " + std::to_string(ambient) +
                                                        "x" + std::to_string(ambient));
        }
        const double defect = (a - a.adjoint()).cwiseAbs().maxCoeff();
        if (defect > 1e-12) {
          throw Error(ErrorKind::InvalidArgument, "Hamiltonian factor not Hermitian (defect " +
                                                      std::to_string(defect) + ")");
        }
      }
    }
  }

  int ambient() const { return ambient_; }
  int n() const { return ambient_ - 1; }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Value at any nonzero representative (scale and phase invariant).
  double value(const CVec& z) const {
    const double zz = z.squaredNorm();
    double h = 0.0;
    for (const auto& t : terms_) {
      double prod = t.coefficient;
      for (const auto& a : t.factors) prod *= std::real(hdot(z, a * z)) / zz;
      h += prod;
    }
    return h;
  }

  /// Euclidean gradient of the lifted function on C^{n+1} = R^{2n+2}. It is orthogonal
  /// to z and iz, hence horizontal.
  CVec gradient(const CVec& z) const {
    const double zz = z.squaredNorm();
    CVec grad = CVec::Zero(z.size());
    for (const auto& t : terms_) {
      const auto nf = t.factors.size();
      if (nf == 0) continue;
      double q[kMaxFactors];
      CVec az[kMaxFactors];
      for (std::size_t f = 0; f < nf; ++f) {
        az[f] = t.factors[f] * z;
        q[f] = std::real(hdot(z, az[f])) / zz;
      }
      for (std::size_t f = 0; f < nf; ++f) {
        double others = t.coefficient;
        for (std::size_t g = 0; g < nf; ++g) {
          if (g != f) others *= q[g];
        }
        grad += (2.0 * others / zz) * (az[f] - q[f] * z);
      }
    }
    return grad;
  }

 private:
  int ambient_ = 0;
  std::vector<HamiltonianTerm> terms_;
};

inline double evaluate(const HamiltonianSpec& h, const ProjectivePoint& p) {
  require_same_size(h.ambient(), p.ambient(), "evaluate");
  return h.value(p.z());
}

namespace detail {

// X_H = -i grad H, so that omega(X_H, v) = -dH(v) with omega(u, v) = g(u, i v).
inline CVec field_at(const HamiltonianSpec& h, const CVec& z) { return cplx(0.0, -1.0) * h.gradient(z); }

}  // namespace detail

/// Hamiltonian vector field at p (horizontal at the stored representative).
inline CVec hamiltonian_field(const HamiltonianSpec& h, const ProjectivePoint& p) {
  require_same_size(h.ambient(), p.ambient(), "hamiltonian_field");
  return horizontal_project(p, detail::field_at(h, p.z()));
}

struct FlowResult {
  ProjectivePoint end;
  double max_drift = 0.0;  // max |H(z_k) - H(z_0)| over the steps
  int steps = 0;
};

/// Classical RK4 on the sphere lift, renormalized every step. No error checks.
inline FlowResult integrate_flow(const HamiltonianSpec& h, const ProjectivePoint& p, double time, double step) {
  require_same_size(h.ambient(), p.ambient(), "flow_point");
  FlowResult out{p, 0.0, 0};
  if (time == 0.0 || h.is_zero()) return out;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(time) / step - 1e-9)));
  const double dt = time / steps;
  const double h0 = h.value(p.z());
  CVec z = p.z();
  for (int k = 0; k < steps; ++k) {
    const CVec k1 = detail::field_at(h, z);
    const CVec k2 = detail::field_at(h, z + 0.5 * dt * k1);
    const CVec k3 = detail::field_at(h, z + 0.5 * dt * k2);
    const CVec k4 = detail::field_at(h, z + dt * k3);
    z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    z /= z.norm();
    out.max_drift = std::max(out.max_drift, std::abs(h.value(z) - h0));
  }
  out.end = ProjectivePoint(z);
  out.steps = steps;
  return out;
}

inline constexpr double kMaxFlowStep = 1e-2;
inline constexpr double kMaxEnergyDrift = 1e-6;

/// Time-T map of the Hamiltonian flow. Throws StepTooLarge when step > 1e-2 or the
/// energy drift exceeds 1e-6.
inline ProjectivePoint flow_point(const HamiltonianSpec& h, const ProjectivePoint& p, double time, double step) {
  if (!(step > 0.0) || step > kMaxFlowStep * (1.0 + 1e-12)) {
    throw Error(ErrorKind::StepTooLarge, "flow step " + std::to_string(step) + " outside (0, 1e-2]");
  }
  if (!std::isfinite(time)) throw Error(ErrorKind::InvalidArgument, "flow time must be finite");
  FlowResult r = integrate_flow(h, p, time, step);
  if (r.max_drift > kMaxEnergyDrift) {
    throw Error(ErrorKind::StepTooLarge, "energy drift " + std::to_string(r.max_drift));
  }
  return r.end;
}

/// Hermitian matrix exponential e^{i s A}.
inline CMat unitary_exp(const CMat& hermitian, double s) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian);
  const auto& w = es.eigenvalues();
  CMat d = CMat::Zero(hermitian.rows(), hermitian.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) d(i, i) = std::exp(cplx(0.0, s * w(i)));
  return es.eigenvectors() * d * es.eigenvectors().adjoint();
}

}  // namespace cpgeom

#endif  // CPGEOM_HAMILTONIAN_HPP
