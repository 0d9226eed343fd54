#pragma once

#include "symq/linalg.hpp"

#include <vector>

namespace symq {

struct InvariantSet {
    RealMatrix linear;                    // columns f with f.x conserved
    std::vector<RealMatrix> quadratic;    // symmetric B with x^T B x / 2 conserved
};

RealMatrix linear_invariants(const RealMatrix& h, const Tolerance& tol = {});

// Throws NotSymmetric if b is not symmetric.
bool quadratic_commutant_check(const RealMatrix& h, const RealMatrix& b, const Tolerance& tol = {});

// Throws NotPositiveDefinite for semidefinite input.
std::vector<RealMatrix> quadratic_invariant_basis(const RealMatrix& h, const Tolerance& tol = {});

// Linear invariants always; quadratic ones only when h is positive definite.
InvariantSet invariants(const RealMatrix& h, const Tolerance& tol = {});

} // namespace symq
