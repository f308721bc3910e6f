#ifndef CPGEOM_TESTS_SUPPORT_HPP
#define CPGEOM_TESTS_SUPPORT_HPP

#include <cpgeom/cpgeom.hpp>

#include <random>

namespace cpgeom::testing {

inline CVec random_vector(int m, std::mt19937_64& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVec v(m);
  for (int i = 0; i < m; ++i) v(i) = cplx(normal(eng), normal(eng));
  return v;
}

inline ProjectivePoint random_point(int m, std::mt19937_64& eng) { return ProjectivePoint(random_vector(m, eng)); }

inline cplx random_phase(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  return std::polar(1.0, angle(eng));
}

inline CVec unit(int m, int k) {
  CVec e = CVec::Zero(m);
  e(k) = 1.0;
  return e;
}

inline RVec vec(std::initializer_list<double> xs) {
  RVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace cpgeom::testing

#endif  // CPGEOM_TESTS_SUPPORT_HPP
