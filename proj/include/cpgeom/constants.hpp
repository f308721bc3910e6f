#ifndef CPGEOM_CONSTANTS_HPP
#define CPGEOM_CONSTANTS_HPP

// Closed-form constants: sphere, RP^n and Clifford-torus volumes, the kinematic
// calibration ratio vol(SU(n+1))/c_n = vol(RP^n)^2/(n+1), the volume lower bound for
// tori in the Hamiltonian class of L_n, and a_n = lower_bound / vol(L_n).

#include "linalg.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

namespace cpgeom {

/// Gamma(k / 2) for a positive integer k via Gamma(x + 1) = x Gamma(x).
inline double gamma_half_integer(int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "gamma_half_integer needs k >= 1");
  double x = (k % 2 == 0) ? 1.0 : 0.5;
  double g = (k % 2 == 0) ? 1.0 : std::sqrt(kPi);
  while (2.0 * x < k) {
    g *= x;
    x += 1.0;
  }
  return g;
}

inline double sphere_volume(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "sphere_volume needs n >= 1");
  return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / gamma_half_integer(n + 1);
}

inline double rp_volume(int n) { return 0.5 * sphere_volume(n); }

/// vol(T^{n+1}) / 2pi with T^{n+1} the torus of radii 1/sqrt(n+1).
inline double clifford_volume(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "clifford_volume needs n >= 1");
  return std::pow(2.0 * kPi / std::sqrt(static_cast<double>(n + 1)), n + 1) / (2.0 * kPi);
}

inline double eqsup_ratio(int n) {
  const double v = rp_volume(n);
  return v * v / (n + 1);
}

struct LowerBound {
  double lower_bound = 0.0;
  double a_n = 0.0;
  double a_n_closed_form = 0.0;  // 2^{n/2} (n+1)^{n/2} vol(S^n) / (2 (2pi)^n)
};

inline LowerBound lower_bound_and_a(int n) {
  LowerBound b;
  b.lower_bound = std::pow(2.0, 0.5 * n) * rp_volume(n) / std::sqrt(static_cast<double>(n + 1));
  b.a_n = b.lower_bound / clifford_volume(n);
  b.a_n_closed_form = std::pow(2.0 * (n + 1), 0.5 * n) * sphere_volume(n) / (2.0 * std::pow(2.0 * kPi, n));
  return b;
}

/// Exact value (num / den) * pi^pi_power / sqrt(root), root squarefree. Used only to
/// print the symbolic column of the constants table.
class ClosedForm {
 public:
  ClosedForm() = default;
  ClosedForm(std::int64_t num, std::int64_t den, int pi_power = 0, std::int64_t root = 1)
      : num_(num), den_(den), pi_(pi_power), root_(root) {
    normalize();
  }

  static ClosedForm sqrt_of(std::int64_t k) { return ClosedForm(k, 1, 0, k); }
  static ClosedForm pi_power(int a) { return ClosedForm(1, 1, a, 1); }

  ClosedForm operator*(const ClosedForm& o) const {
    ClosedForm r;
    r.num_ = checked(static_cast<__int128>(num_) * o.num_);
    r.den_ = checked(static_cast<__int128>(den_) * o.den_);
    r.pi_ = pi_ + o.pi_;
    r.root_ = checked(static_cast<__int128>(root_) * o.root_);
    r.normalize();
    return r;
  }

  ClosedForm inverse() const {
    // 1 / ((p/q) pi^a / sqrt(m)) = (q m / p) pi^{-a} / sqrt(m)
    return ClosedForm(checked(static_cast<__int128>(den_) * root_), num_, -pi_, root_);
  }

  ClosedForm operator/(const ClosedForm& o) const { return *this * o.inverse(); }

  double value() const {
    return static_cast<double>(num_) / static_cast<double>(den_) * std::pow(kPi, pi_) /
           std::sqrt(static_cast<double>(root_));
  }

  /// e.g. "4*pi^2/(3*sqrt(3))", "3/pi", "sqrt(2)*pi^2".
  std::string str() const {
    std::string top;
    auto append = [](std::string& s, const std::string& f) { s += s.empty() ? f : "*" + f; };
    // k m / sqrt(m) prints as k sqrt(m)
    const bool root_on_top = root_ != 1 && num_ % root_ == 0;
    const std::int64_t num = root_on_top ? num_ / root_ : num_;
    if (num != 1 || (pi_ <= 0 && !root_on_top)) top = std::to_string(num);
    if (root_on_top) append(top, "sqrt(" + std::to_string(root_) + ")");
    if (pi_ > 0) append(top, pi_ == 1 ? "pi" : "pi^" + std::to_string(pi_));
    std::string bottom;
    int factors = 0;
    if (den_ != 1) {
      append(bottom, std::to_string(den_));
      ++factors;
    }
    if (pi_ < 0) {
      append(bottom, pi_ == -1 ? "pi" : "pi^" + std::to_string(-pi_));
      ++factors;
    }
    if (root_ != 1 && !root_on_top) {
      append(bottom, "sqrt(" + std::to_string(root_) + ")");
      ++factors;
    }
    if (factors == 0) return top;
    return top + "/" + (factors > 1 ? "(" + bottom + ")" : bottom);
  }

 private:
  static std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw Error(ErrorKind::InvalidArgument, "closed form overflow");
    return static_cast<std::int64_t>(v);
  }

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    // pull square factors out of the root: 1/sqrt(k^2 m) = 1/(k sqrt(m))
    for (std::int64_t f = 2; f * f <= root_; ++f) {
      while (root_ % (f * f) == 0) {
        root_ /= f * f;
        den_ = checked(static_cast<__int128>(den_) * f);
      }
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  int pi_ = 0;
  std::int64_t root_ = 1;
};

namespace detail {

inline std::int64_t factorial(int k) {
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace detail

inline ClosedForm sphere_volume_exact(int n) {
  const int k = (n + 1) / 2;
  if ((n + 1) % 2 == 0) return ClosedForm(2, detail::factorial(k - 1), k);  // 2 pi^k / (k-1)!
  const int h = n / 2;  // Gamma(h + 1/2) = (2h)! sqrt(pi) / (4^h h!)
  return ClosedForm(2 * detail::ipow(4, h) * detail::factorial(h), detail::factorial(2 * h), h);
}

inline ClosedForm clifford_volume_exact(int n) {
  // (2pi)^n / (n+1)^{(n+1)/2}
  const int m = n + 1;
  ClosedForm r(detail::ipow(2, n), detail::ipow(m, m / 2), n);
  if (m % 2 == 1) r = r / ClosedForm::sqrt_of(m);
  return r;
}

struct ConstantsRow {
  int n = 0;
  double vol_sphere_n = 0.0;
  double vol_rp_n = 0.0;
  double vol_clifford_n = 0.0;
  double eqsup_ratio = 0.0;
  double lower_bound = 0.0;
  double a_n = 0.0;
  // symbolic forms; empty when the exact integers overflow
  std::string vol_sphere_n_sym, vol_rp_n_sym, vol_clifford_n_sym, eqsup_ratio_sym, lower_bound_sym, a_n_sym;
};

inline ConstantsRow constants_row(int n) {
  ConstantsRow row;
  row.n = n;
  row.vol_sphere_n = sphere_volume(n);
  row.vol_rp_n = rp_volume(n);
  row.vol_clifford_n = clifford_volume(n);
  row.eqsup_ratio = eqsup_ratio(n);
  const auto lb = lower_bound_and_a(n);
  row.lower_bound = lb.lower_bound;
  row.a_n = lb.a_n;
  if (n > 16) return row;
  try {
    const ClosedForm sphere = sphere_volume_exact(n);
    const ClosedForm rp = sphere / ClosedForm(2, 1);
    const ClosedForm cliff = clifford_volume_exact(n);
    const ClosedForm sup = rp * rp / ClosedForm(n + 1, 1);
    const ClosedForm lower = ClosedForm::sqrt_of(detail::ipow(2, n)) * rp / ClosedForm::sqrt_of(n + 1);
    const ClosedForm a = lower / cliff;
    row.vol_sphere_n_sym = sphere.str();
    row.vol_rp_n_sym = rp.str();
    row.vol_clifford_n_sym = cliff.str();
    row.eqsup_ratio_sym = sup.str();
    row.lower_bound_sym = lower.str();
    row.a_n_sym = a.str();
  } catch (const Error&) {
  }
  return row;
}

}  // namespace cpgeom

#endif  // CPGEOM_CONSTANTS_HPP
