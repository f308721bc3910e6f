#ifndef CPGEOM_DEFORM_HPP
#define CPGEOM_DEFORM_HPP

#include "lagrangian.hpp"
#include "random_unitary.hpp"

namespace cpgeom {

/// Hamiltonian deformation theta -> flow_T(base.chart(theta)) of a Clifford torus or a
/// unitary image of one.
inline ParametricLagrangian deform_lagrangian(const ParametricLagrangian& base, const HamiltonianSpec& h, double time,
                                              double step = 1e-3) {
  const ParametricLagrangian* root = &base;
  while (root->kind() == ModelKind::UnitaryImage) root = root->base();
  if (root->kind() != ModelKind::Clifford) {
    throw Error(ErrorKind::InvalidArgument, "deform_lagrangian expects a Clifford torus or a unitary image of one");
  }
  return ParametricLagrangian::deformed(base, h, time, step);
}

/// Hermitian matrix with Gaussian entries, scaled to spectral norm 1.
template <class Engine>
CMat random_hermitian(int m, Engine& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat a(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) a(i, j) = cplx(normal(eng), normal(eng));
  }
  CMat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  h /= norm;
  return 0.5 * (h + h.adjoint());  // exact symmetry after scaling
}

/// c (z^*Az)(z^*Bz) with A, B random Hermitian of unit norm and c uniform in
/// [max_coefficient / 2, max_coefficient].
inline HamiltonianSpec random_quartic_hamiltonian(int n, const SeedStream& s, double max_coefficient = 0.2) {
  auto eng = s.engine();
  std::uniform_real_distribution<double> coef(0.5 * max_coefficient, max_coefficient);
  HamiltonianTerm t;
  t.coefficient = coef(eng);
  t.factors.push_back(random_hermitian(n + 1, eng));
  t.factors.push_back(random_hermitian(n + 1, eng));
  return HamiltonianSpec(n + 1, {t});
}

/// c z^*Az with A random Hermitian of unit norm; its flow is a unitary one-parameter group.
inline HamiltonianSpec random_quadratic_hamiltonian(int n, const SeedStream& s, double coefficient = 1.0) {
  auto eng = s.engine();
  HamiltonianTerm t;
  t.coefficient = coefficient;
  t.factors.push_back(random_hermitian(n + 1, eng));
  return HamiltonianSpec(n + 1, {t});
}

}  // namespace cpgeom

#endif  // CPGEOM_DEFORM_HPP
