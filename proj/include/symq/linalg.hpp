#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace symq {

using Index = Eigen::Index;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct Tolerance {
    double rank_rel = 1e-10;      // singular values below rank_rel * sigma_max are zero
    double verify_abs = 1e-9;     // residual bound for identities
    double degeneracy_rel = 1e-8; // relative width for grouping frequencies

    // Throws InvalidArgument unless every field lies in (0, 1).
    void validate() const;
};

struct KernelResult {
    Index rank = 0;
    RealMatrix basis; // orthonormal columns spanning the kernel
};

struct EigenPairs {
    ComplexVector values;
    ComplexMatrix vectors;         // unit-norm columns matched to values
    std::vector<Index> conjugate;  // index of the conjugate partner (self for real values)
};

// Throws InvalidArgument if any entry is NaN or infinite.
void require_finite(const RealMatrix& m, const char* what);

// Flips the sign of each column so its first non-negligible entry is positive.
void fix_column_signs(RealMatrix& m);

// Singular values at or below rank_rel * max(sigma_max, reference) count as zero.
// A positive reference lets callers measure rank against an outer scale.
KernelResult rank_kernel(const RealMatrix& m, const Tolerance& tol = {}, double reference = 0.0);

EigenPairs eig_nonsymmetric(const RealMatrix& m, const Tolerance& tol = {});

// Minimum-norm least-squares solution; throws Inconsistent if b is not in range(a).
RealVector solve_min_norm(const RealMatrix& a, const RealVector& b, const Tolerance& tol = {});

// Moore-Penrose pseudo-inverse with the rank_rel threshold.
RealMatrix pseudo_inverse(const RealMatrix& a, const Tolerance& tol = {});

RealMatrix expm(const RealMatrix& m, double t);

// Orthonormal basis for the column span of m, same rank rule as rank_kernel.
RealMatrix orthonormal_span(const RealMatrix& m, const Tolerance& tol = {}, double reference = 0.0);

} // namespace symq
