#ifndef CPGEOM_PROJECTIVE_HPP
#define CPGEOM_PROJECTIVE_HPP

// Fubini-Study geometry of CP^n, realized as the unit sphere S^{2n+1} in C^{n+1}
// modulo the diagonal phase circle. CP^1 is the round sphere of radius 1/2.
//
// Tangent vectors at [z] are represented by horizontal vectors v (<z, v> = 0). A change
// of representative z -> lambda z carries v -> lambda v; every operation here accounts
// for that, so results depend only on the projective data.

#include "linalg.hpp"

#include <cmath>

namespace cpgeom {

/// A point of CP^n stored as a unit representative in C^{n+1}.
class ProjectivePoint {
 public:
  ProjectivePoint() = default;

  explicit ProjectivePoint(const CVec& z) {
    const double norm = z.norm();
    if (!(norm >= 1e-14)) throw Error(ErrorKind::ZeroVector, "cannot normalize a zero vector");
    if (z.size() < 2 || z.size() > kMaxAmbient) {
      throw Error(ErrorKind::DimensionMismatch,
                  "ambient dimension " + std::to_string(z.size()) + " outside [2, " +
                      std::to_string(kMaxAmbient) + "]");
    }
    z_ = z / norm;
  }

  const CVec& z() const { return z_; }
  int n() const { return static_cast<int>(z_.size()) - 1; }
  Eigen::Index ambient() const { return z_.size(); }

  /// Drops the rounding residue in the imaginary part of a coordinate already rotated onto
  /// the positive real axis.
  void set_real_pivot(Eigen::Index i) { z_(i) = cplx(std::abs(z_(i)), 0.0); }

  /// Same projective point, representative multiplied by a unit phase.
  ProjectivePoint rephased(cplx phase) const {
    ProjectivePoint out;
    out.z_ = z_ * (phase / std::abs(phase));
    return out;
  }

 private:
  CVec z_;
};

/// Canonical representative: unit norm, largest-modulus entry (lowest index on ties) real
/// positive. Idempotent.
inline ProjectivePoint gauge_fix(const ProjectivePoint& p) {
  const CVec& u = p.z();
  Eigen::Index best = 0;
  double best_abs = std::abs(u(0));
  for (Eigen::Index i = 1; i < u.size(); ++i) {
    const double a = std::abs(u(i));
    if (a > best_abs * (1.0 + 1e-12) + 1e-300) {
      best = i;
      best_abs = a;
    }
  }
  // already canonical: hand it back untouched so a second pass is bitwise a no-op
  if (u(best).imag() == 0.0 && u(best).real() > 0.0) return p;
  ProjectivePoint out = p.rephased(std::conj(u(best)));
  out.set_real_pivot(best);
  return out;
}

inline ProjectivePoint gauge_fix(const CVec& z) { return gauge_fix(ProjectivePoint(z)); }

/// w - <z, w> z: removes both the radial and the vertical (iz) component.
inline CVec horizontal_project(const ProjectivePoint& p, const CVec& w) {
  require_same_size(p.ambient(), w.size(), "horizontal_project");
  return w - hdot(p.z(), w) * p.z();
}

namespace detail {

// Returns (sin d, cos d) for the Fubini-Study distance d without the cancellation
// in 1 - |<p, q>|^2.
inline std::pair<double, double> sin_cos_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  require_same_size(p.ambient(), q.ambient(), "fs_distance");
  const cplx overlap = hdot(p.z(), q.z());
  const double s = (q.z() - overlap * p.z()).norm();
  return {s, std::abs(overlap)};
}

}  // namespace detail

/// Geodesic distance arccos |<z_p, z_q>|, in [0, pi/2].
inline double fs_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  auto [s, c] = detail::sin_cos_distance(p, q);
  return std::atan2(s, c);
}

/// 1 - |<z_p, z_q>|^2 = sin^2(fs_distance), evaluated as a squared residual norm.
inline double chordal_gap(const ProjectivePoint& p, const ProjectivePoint& q) {
  auto [s, c] = detail::sin_cos_distance(p, q);
  (void)c;
  return std::clamp(s * s, 0.0, 1.0);
}

/// omega(u, v) = g(u, i v) with g = Re<.,.>; fixed by omega(u, i u) = -|u|^2.
inline double symplectic_pairing(const ProjectivePoint& p, const CVec& u, const CVec& v) {
  require_same_size(p.ambient(), u.size(), "symplectic_pairing");
  require_same_size(p.ambient(), v.size(), "symplectic_pairing");
  const double hu = std::abs(hdot(p.z(), u)) / std::max(1.0, u.norm());
  const double hv = std::abs(hdot(p.z(), v)) / std::max(1.0, v.norm());
  if (hu > 1e-6 || hv > 1e-6) {
    throw Error(ErrorKind::NotHorizontal,
                "horizontality residual " + std::to_string(std::max(hu, hv)));
  }
  return -std::imag(hdot(u, v));
}

/// n horizontal vectors (columns) at a base point.
class HorizontalFrame {
 public:
  HorizontalFrame() = default;

  /// Projects the columns horizontally at `base`. Throws DegenerateFrame when the
  /// normalized real Gram determinant falls below `min_gram`.
  HorizontalFrame(ProjectivePoint base, const CMat& vectors, double min_gram = 1e-12)
      : base_(std::move(base)), vectors_(vectors) {
    require_same_size(base_.ambient(), vectors.rows(), "HorizontalFrame");
    for (Eigen::Index k = 0; k < vectors_.cols(); ++k) {
      vectors_.col(k) = horizontal_project(base_, vectors_.col(k));
    }
    const double g = normalized_gram_det();
    if (!(g >= min_gram)) {
      throw Error(ErrorKind::DegenerateFrame, "normalized Gram determinant " + std::to_string(g));
    }
  }

  const ProjectivePoint& base() const { return base_; }
  const CMat& vectors() const { return vectors_; }
  Eigen::Index size() const { return vectors_.cols(); }

  /// Real Gram matrix Re<v_j, v_k>.
  RMat gram() const {
    RMat g(vectors_.cols(), vectors_.cols());
    for (Eigen::Index j = 0; j < vectors_.cols(); ++j) {
      for (Eigen::Index k = 0; k < vectors_.cols(); ++k) g(j, k) = rdot(vectors_.col(j), vectors_.col(k));
    }
    return g;
  }

  double normalized_gram_det() const {
    RMat m(2 * vectors_.rows(), vectors_.cols());
    for (Eigen::Index k = 0; k < vectors_.cols(); ++k) {
      const double nk = vectors_.col(k).norm();
      if (nk == 0.0) return 0.0;
      m.col(k) = realify(vectors_.col(k)) / nk;
    }
    const double v = column_volume(m);
    return v * v;
  }

  /// The frame expressed at the representative phase * z.
  HorizontalFrame rephased(cplx phase) const {
    HorizontalFrame out;
    const cplx u = phase / std::abs(phase);
    out.base_ = base_.rephased(u);
    out.vectors_ = vectors_ * u;
    return out;
  }

 private:
  ProjectivePoint base_;
  CMat vectors_;
};

/// Push a frame forward by a unitary matrix.
inline HorizontalFrame transform(const CMat& unitary, const HorizontalFrame& f) {
  require_same_size(unitary.cols(), f.base().ambient(), "transform");
  return HorizontalFrame(ProjectivePoint(unitary * f.base().z()), unitary * f.vectors(), 0.0);
}

inline ProjectivePoint transform(const CMat& unitary, const ProjectivePoint& p) {
  require_same_size(unitary.cols(), p.ambient(), "transform");
  return ProjectivePoint(unitary * p.z());
}

namespace detail {

// Modified Gram-Schmidt over the reals with one re-orthogonalization pass.
inline RMat orthonormal_real_columns(const CMat& vectors, double tol) {
  RMat q(2 * vectors.rows(), vectors.cols());
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    RVec v = realify(vectors.col(k));
    const double original = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) v -= q.col(j).dot(v) * q.col(j);
    }
    const double nv = v.norm();
    if (!(original > 0.0) || nv < tol * original) {
      throw Error(ErrorKind::DegenerateFrame, "frame columns are linearly dependent");
    }
    q.col(k) = v / nv;
  }
  return q;
}

// sigma for frames whose bases agree projectively to within the caller's tolerance.
inline double sigma_aligned(const HorizontalFrame& a, const HorizontalFrame& b) {
  if (a.normalized_gram_det() < 1e-12 || b.normalized_gram_det() < 1e-12) {
    throw Error(ErrorKind::DegenerateFrame, "sigma_angle needs nondegenerate frames");
  }
  // Express b at a's representative: z_b = mu z_a carries v to conj(mu) v.
  const cplx mu = hdot(a.base().z(), b.base().z());
  const cplx to_a = std::conj(mu) / std::abs(mu);
  CMat bv(b.vectors().rows(), b.vectors().cols());
  for (Eigen::Index k = 0; k < bv.cols(); ++k) {
    bv.col(k) = horizontal_project(a.base(), to_a * b.vectors().col(k));
  }
  const RMat qa = orthonormal_real_columns(a.vectors(), 1e-6);
  const RMat qb = orthonormal_real_columns(bv, 1e-6);
  RMat m(qa.rows(), qa.cols() + qb.cols());
  m << qa, qb;
  return std::min(1.0, column_volume(m));
}

}  // namespace detail

/// |u_1 ^ ... ^ u_n ^ v_1 ^ ... ^ v_n| for orthonormalized bases of the two planes.
/// Zero iff the planes share a direction; one iff they are orthogonal complements.
inline double sigma_angle(const HorizontalFrame& a, const HorizontalFrame& b) {
  require_same_size(a.base().ambient(), b.base().ambient(), "sigma_angle");
  auto [s, c] = detail::sin_cos_distance(a.base(), b.base());
  (void)c;
  if (s > 1e-10) {
    throw Error(ErrorKind::BasePointMismatch, "frames based at distance " + std::to_string(s));
  }
  return detail::sigma_aligned(a, b);
}

/// A unitary V whose first column is z (V e_1 = z).
inline CMat unitary_completion(const CVec& z) {
  const ProjectivePoint p(z);
  CMat col = p.z();
  Eigen::HouseholderQR<CMat> qr(col);
  CMat v = qr.householderQ();
  const cplx r00 = qr.matrixQR()(0, 0);
  v.col(0) *= r00 / std::abs(r00);
  return v;
}

}  // namespace cpgeom

#endif  // CPGEOM_PROJECTIVE_HPP
