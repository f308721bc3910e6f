#ifndef CPGEOM_RANDOM_UNITARY_HPP
#define CPGEOM_RANDOM_UNITARY_HPP

// Reproducible Haar sampling on U(m), SU(m) and on the stabilizer of a point of CP^n.

#include "projective.hpp"

#include <cstdint>
#include <random>

namespace cpgeom {

namespace detail {

// splitmix64 finalizer; a bijection of 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based stream: (master_seed, index) -> an independent generator.
struct SeedStream {
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;

  /// Injective in `index` for a fixed master seed.
  constexpr std::uint64_t key() const {
    return detail::mix64(detail::mix64(master_seed) ^ (index * 0xd1342543de82ef95ULL));
  }

  std::mt19937_64 engine() const { return std::mt19937_64(key()); }

  /// A child stream keyed by this stream; used to split one sample into sub-draws.
  SeedStream child(std::uint64_t i) const { return SeedStream{key(), i}; }

  friend bool operator==(const SeedStream&, const SeedStream&) = default;
};

inline SeedStream derive_stream(std::uint64_t master, std::uint64_t i) { return SeedStream{master, i}; }

struct UnitaryMatrix {
  CMat entries;
  bool special = false;

  Eigen::Index dim() const { return entries.rows(); }
};

inline double unitarity_defect(const CMat& u) {
  return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// Haar sample on U(m) from a given engine: Ginibre matrix, QR, diagonal phases of R moved
/// into Q.
template <class Engine>
CMat haar_unitary_from(int m, Engine& eng) {
  if (m < 1 || m > kMaxAmbient) {
    throw Error(ErrorKind::InvalidArgument, "haar_unitary: dimension " + std::to_string(m));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);
  for (;;) {
    CMat g(m, m);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        const double re = normal(eng);
        const double im = normal(eng);
        g(i, j) = cplx(re, im) * scale;
      }
    }
    Eigen::HouseholderQR<CMat> qr(g);
    const CMat& r = qr.matrixQR();
    double smallest = std::abs(r(0, 0));
    for (int i = 1; i < m; ++i) smallest = std::min(smallest, std::abs(r(i, i)));
    if (smallest < 1e-10) continue;  // numerically rank deficient; redraw
    CMat q = qr.householderQ();
    for (int i = 0; i < m; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
    return q;
  }
}

inline UnitaryMatrix haar_unitary(int m, const SeedStream& s) {
  auto eng = s.engine();
  return UnitaryMatrix{haar_unitary_from(m, eng), false};
}

/// U * det(U)^{-1/m} with the principal root.
inline UnitaryMatrix to_special(const UnitaryMatrix& u) {
  const auto m = static_cast<double>(u.dim());
  const cplx det = u.entries.determinant();
  const cplx root = std::exp(cplx(0.0, std::arg(det) / m));
  return UnitaryMatrix{u.entries / root, true};
}

/// Haar element of the stabilizer of [z_r] in U(n+1): V blockdiag(phase, W) V^* with
/// V e_1 = z_r and W Haar on U(n).
inline UnitaryMatrix stabilizer_sample(const ProjectivePoint& r, const SeedStream& s) {
  const int m = static_cast<int>(r.ambient());
  auto eng = s.engine();
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  const double alpha = angle(eng);
  const CMat w = haar_unitary_from(m - 1, eng);
  CMat block = CMat::Zero(m, m);
  block(0, 0) = std::exp(cplx(0.0, alpha));
  block.bottomRightCorner(m - 1, m - 1) = w;
  const CMat v = unitary_completion(r.z());
  return UnitaryMatrix{v * block * v.adjoint(), false};
}

}  // namespace cpgeom

#endif  // CPGEOM_RANDOM_UNITARY_HPP
