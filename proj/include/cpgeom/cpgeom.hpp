#ifndef CPGEOM_CPGEOM_HPP
#define CPGEOM_CPGEOM_HPP

#include "constants.hpp"
#include "deform.hpp"
#include "hamiltonian.hpp"
#include "intersection.hpp"
#include "kinematic.hpp"
#include "lagrangian.hpp"
#include "linalg.hpp"
#include "projective.hpp"
#include "random_unitary.hpp"

#endif  // CPGEOM_CPGEOM_HPP
