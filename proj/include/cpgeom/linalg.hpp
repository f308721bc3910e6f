#ifndef CPGEOM_LINALG_HPP
#define CPGEOM_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cpgeom {

using cplx = std::complex<double>;

// Geometry is desk scale: CP^n with n + 1 <= kMaxAmbient. Bounded storage keeps
// the inner Newton/RK4 loops free of heap traffic.
inline constexpr int kMaxAmbient = 8;
inline constexpr int kMaxReal = 2 * kMaxAmbient;

using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxAmbient, 1>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxAmbient>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxReal, 1>;
using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxReal, kMaxReal>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

enum class ErrorKind {
  ZeroVector,
  DimensionMismatch,
  NotHorizontal,
  BasePointMismatch,
  DegenerateFrame,
  NotUnit,
  StepTooLarge,
  ConvergenceBudgetExceeded,
  DegenerateSpectrum,
  TooManyExcluded,
  InvalidArgument,
  Parse,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHorizontal: return "NotHorizontal";
    case ErrorKind::BasePointMismatch: return "BasePointMismatch";
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::NotUnit: return "NotUnit";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::ConvergenceBudgetExceeded: return "ConvergenceBudgetExceeded";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::TooManyExcluded: return "TooManyExcluded";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(where) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

/// Hermitian product, conjugate-linear in the first slot: <a, b> = sum conj(a_i) b_i.
inline cplx hdot(const CVec& a, const CVec& b) { return a.dot(b); }

/// Real inner product of C^m viewed as R^{2m}.
inline double rdot(const CVec& a, const CVec& b) { return std::real(a.dot(b)); }

/// Stack a complex vector into its real coordinates (re_0, im_0, re_1, im_1, ...).
inline RVec realify(const CVec& v) {
  RVec out(2 * v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out(2 * i) = v(i).real();
    out(2 * i + 1) = v(i).imag();
  }
  return out;
}

/// Absolute value of the volume spanned by the columns of a real matrix.
inline double column_volume(const RMat& m) {
  if (m.cols() == 0) return 1.0;
  Eigen::HouseholderQR<RMat> qr(m);
  const RMat& r = qr.matrixQR();
  double vol = 1.0;
  for (Eigen::Index i = 0; i < m.cols(); ++i) vol *= std::abs(r(i, i));
  return vol;
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs fn(i) for i in [0, count) over a static partition. fn must write only to slot i
/// of caller-owned storage; the first exception (lowest worker) is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(resolve_threads(threads),
                                             static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Pairwise summation in a fixed order, so totals do not depend on scheduling.
inline double pairwise_sum(const double* x, std::size_t len) {
  if (len <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += x[i];
    return s;
  }
  std::size_t half = len / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, len - half);
}

inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace cpgeom

#endif  // CPGEOM_LINALG_HPP
