#include "support.hpp"

#include <gtest/gtest.h>

using namespace cpgeom;

TEST(Gamma, HalfIntegers) {
  EXPECT_NEAR(gamma_half_integer(1), std::sqrt(kPi), 1e-15);
  EXPECT_EQ(gamma_half_integer(2), 1.0);
  EXPECT_NEAR(gamma_half_integer(3), std::sqrt(kPi) / 2, 1e-15);
  EXPECT_EQ(gamma_half_integer(8), 6.0);
  for (int k = 1; k <= 40; ++k) EXPECT_NEAR(gamma_half_integer(k) / std::tgamma(k / 2.0), 1.0, 1e-13);
  EXPECT_THROW(gamma_half_integer(0), Error);
}

TEST(Sphere, Examples) {
  EXPECT_NEAR(sphere_volume(1), 2 * kPi, 1e-15);
  EXPECT_NEAR(sphere_volume(2), 4 * kPi, 1e-14);
  EXPECT_NEAR(sphere_volume(3), 2 * kPi * kPi, 1e-14);
  EXPECT_NEAR(rp_volume(2), 2 * kPi, 1e-15);
}

TEST(Clifford, Examples) {
  EXPECT_NEAR(clifford_volume(2) / (4 * kPi * kPi / (3 * std::sqrt(3.0))), 1.0, 1e-15);
  EXPECT_NEAR(clifford_volume(1), kPi, 1e-15);
  EXPECT_NEAR(clifford_volume(3), std::pow(kPi, 3) / 2, 1e-13);
}

TEST(EqSup, Examples) {
  EXPECT_NEAR(eqsup_ratio(2) / (4 * kPi * kPi / 3), 1.0, 1e-15);
  EXPECT_NEAR(eqsup_ratio(1), kPi * kPi / 2, 1e-14);
  for (int n = 1; n <= 12; ++n) EXPECT_NEAR(eqsup_ratio(n) * (n + 1) / (rp_volume(n) * rp_volume(n)), 1.0, 1e-15);
}

TEST(LowerBound, Examples) {
  const LowerBound b2 = lower_bound_and_a(2);
  EXPECT_NEAR(b2.lower_bound / (4 * kPi / std::sqrt(3.0)), 1.0, 1e-15);
  EXPECT_NEAR(b2.a_n / (3 / kPi), 1.0, 1e-15);
  const LowerBound b1 = lower_bound_and_a(1);
  EXPECT_NEAR(b1.lower_bound, kPi, 1e-15);
  EXPECT_NEAR(b1.a_n, 1.0, 1e-15);
  // a_3 = 2 sqrt(2) / pi, evaluated independently
  EXPECT_NEAR(lower_bound_and_a(3).a_n, 2 * std::sqrt(2.0) / kPi, 1e-15);
  EXPECT_NEAR(lower_bound_and_a(3).a_n, 0.9003, 5e-5);
}

TEST(LowerBound, ChainIdentities) {
  for (int n = 1; n <= 8; ++n) {
    const LowerBound b = lower_bound_and_a(n);
    EXPECT_NEAR(b.lower_bound * b.lower_bound / (std::pow(2.0, n) * eqsup_ratio(n)), 1.0, 1e-14);
    EXPECT_NEAR(b.a_n / b.a_n_closed_form, 1.0, 1e-14);
    EXPECT_GT(b.a_n, 0.0);
    EXPECT_LE(b.a_n, 1.0 + 1e-15);
  }
}

TEST(ClosedForm, Strings) {
  const ConstantsRow r2 = constants_row(2);
  EXPECT_EQ(r2.vol_rp_n_sym, "2*pi");
  EXPECT_EQ(r2.vol_sphere_n_sym, "4*pi");
  EXPECT_EQ(r2.vol_clifford_n_sym, "4*pi^2/(3*sqrt(3))");
  EXPECT_EQ(r2.eqsup_ratio_sym, "4*pi^2/3");
  EXPECT_EQ(r2.lower_bound_sym, "4*pi/sqrt(3)");
  EXPECT_EQ(r2.a_n_sym, "3/pi");
  const ConstantsRow r1 = constants_row(1);
  EXPECT_EQ(r1.vol_clifford_n_sym, "pi");
  EXPECT_EQ(r1.a_n_sym, "1");
  EXPECT_EQ(constants_row(3).a_n_sym, "2*sqrt(2)/pi");
  EXPECT_EQ(constants_row(3).vol_clifford_n_sym, "pi^3/2");
}

TEST(ClosedForm, ValuesMatchFloatingPoint) {
  for (int n = 1; n <= 16; ++n) {
    const ConstantsRow r = constants_row(n);
    EXPECT_NEAR(sphere_volume_exact(n).value() / r.vol_sphere_n, 1.0, 1e-13) << n;
    EXPECT_NEAR(clifford_volume_exact(n).value() / r.vol_clifford_n, 1.0, 1e-13) << n;
  }
  EXPECT_TRUE(constants_row(30).a_n_sym.empty());
  EXPECT_GT(constants_row(30).a_n, 0.0);
}

TEST(ClosedForm, Arithmetic) {
  const ClosedForm a(4, 3, 2, 3);
  EXPECT_NEAR(a.value(), 4 * kPi * kPi / (3 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR((a * a.inverse()).value(), 1.0, 1e-15);
  EXPECT_EQ((a / a).str(), "1");
  EXPECT_EQ(ClosedForm(6, 4).str(), "3/2");
  EXPECT_EQ(ClosedForm(1, 1, 0, 12).str(), "1/(2*sqrt(3))");
}
