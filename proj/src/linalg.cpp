#include "symq/linalg.hpp"

#include "symq/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace symq {

namespace {

using Svd = Eigen::JacobiSVD<RealMatrix>;

double threshold(const RealVector& sigma, double rank_rel, double reference = 0.0) {
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
    return rank_rel * std::max(smax, reference);
}

Index numeric_rank(const RealVector& sigma, double thr) {
    Index r = 0;
    while (r < sigma.size() && sigma(r) > thr && sigma(r) > 0.0) ++r;
    return r;
}

} // namespace

void Tolerance::validate() const {
    auto ok = [](double v) { return v > 0.0 && v < 1.0; };
    if (!ok(rank_rel) || !ok(verify_abs) || !ok(degeneracy_rel))
        throw Error(ErrorCode::InvalidArgument, "tolerances must lie strictly between 0 and 1");
}

void require_finite(const RealMatrix& m, const char* what) {
    if (!m.allFinite())
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

void fix_column_signs(RealMatrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        const double peak = m.col(j).cwiseAbs().maxCoeff();
        if (peak == 0.0) continue;
        for (Index i = 0; i < m.rows(); ++i) {
            if (std::abs(m(i, j)) > 1e-8 * peak) {
                if (m(i, j) < 0.0) m.col(j) *= -1.0;
                break;
            }
        }
    }
}

KernelResult rank_kernel(const RealMatrix& m, const Tolerance& tol, double reference) {
    require_finite(m, "matrix");
    KernelResult out;
    if (m.rows() == 0 || m.cols() == 0) {
        out.basis = RealMatrix::Identity(m.cols(), m.cols());
        return out;
    }
    Svd svd(m, Eigen::ComputeFullV);
    out.rank = numeric_rank(svd.singularValues(),
                            threshold(svd.singularValues(), tol.rank_rel, reference));
    out.basis = svd.matrixV().rightCols(m.cols() - out.rank);
    fix_column_signs(out.basis);
    return out;
}

RealMatrix orthonormal_span(const RealMatrix& m, const Tolerance& tol, double reference) {
    if (m.rows() == 0 || m.cols() == 0) return RealMatrix(m.rows(), 0);
    Svd svd(m, Eigen::ComputeThinU);
    const Index r =
        numeric_rank(svd.singularValues(), threshold(svd.singularValues(), tol.rank_rel, reference));
    RealMatrix u = svd.matrixU().leftCols(r);
    fix_column_signs(u);
    return u;
}

EigenPairs eig_nonsymmetric(const RealMatrix& m, const Tolerance&) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::NotSquare, "eigenproblem needs a square matrix");
    require_finite(m, "matrix");
    EigenPairs out;
    if (m.rows() == 0) return out;
    Eigen::EigenSolver<RealMatrix> es(m, true);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::ConvergenceFailure, "nonsymmetric eigensolver did not converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    for (Index j = 0; j < out.vectors.cols(); ++j) {
        const double nrm = out.vectors.col(j).norm();
        if (nrm > 0.0) out.vectors.col(j) /= nrm;
    }
    const Index n = out.values.size();
    out.conjugate.assign(static_cast<size_t>(n), 0);
    for (Index i = 0; i < n; ++i) {
        if (out.values(i).imag() == 0.0) {
            out.conjugate[static_cast<size_t>(i)] = i;
        } else if (i + 1 < n && out.values(i + 1) == std::conj(out.values(i))) {
            out.conjugate[static_cast<size_t>(i)] = i + 1;
            out.conjugate[static_cast<size_t>(i + 1)] = i;
            ++i;
        } else {
            // Fall back to the nearest conjugate if the solver did not emit adjacent pairs.
            Index best = i;
            double dist = std::numeric_limits<double>::infinity();
            for (Index k = 0; k < n; ++k) {
                const double d = std::abs(out.values(k) - std::conj(out.values(i)));
                if (k != i && d < dist) { dist = d; best = k; }
            }
            out.conjugate[static_cast<size_t>(i)] = best;
        }
    }
    return out;
}

RealMatrix pseudo_inverse(const RealMatrix& a, const Tolerance& tol) {
    if (a.rows() == 0 || a.cols() == 0) return RealMatrix::Zero(a.cols(), a.rows());
    Svd svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const Index r = numeric_rank(s, threshold(s, tol.rank_rel));
    RealMatrix out = RealMatrix::Zero(a.cols(), a.rows());
    for (Index k = 0; k < r; ++k)
        out.noalias() += svd.matrixV().col(k) * (svd.matrixU().col(k).transpose() / s(k));
    return out;
}

RealVector solve_min_norm(const RealMatrix& a, const RealVector& b, const Tolerance& tol) {
    if (a.rows() != b.size())
        throw Error(ErrorCode::InvalidArgument, "right-hand side length does not match matrix rows");
    require_finite(a, "matrix");
    const RealVector x = pseudo_inverse(a, tol) * b;
    const double residual = (a * x - b).norm();
    const double bound = tol.verify_abs * (1.0 + b.norm() + a.norm() * x.norm());
    if (residual > bound)
        throw Error(ErrorCode::Inconsistent,
                    "right-hand side is outside the column space (residual " +
                        std::to_string(residual) + ")");
    return x;
}

RealMatrix expm(const RealMatrix& m, double t) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::NotSquare, "expm needs a square matrix");
    if (m.rows() == 0) return m;
    const RealMatrix scaled = m * t;
    return scaled.exp();
}

} // namespace symq
