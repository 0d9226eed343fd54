#include "symq/invariants.hpp"

#include "symq/error.hpp"
#include "symq/williamson.hpp"

#include <cmath>

namespace symq {

namespace {

void require_symmetric(const RealMatrix& b, const Tolerance& tol) {
    if (b.rows() != b.cols()) throw Error(ErrorCode::NotSquare, "matrix must be square");
    const double scale = b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > tol.verify_abs * scale)
        throw Error(ErrorCode::NotSymmetric, "quadratic form must be symmetric");
}

bool positive_definite(const RealMatrix& h, const Tolerance& tol) {
    if (h.size() == 0) return false;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (h + h.transpose()), Eigen::EigenvaluesOnly);
    const RealVector& lam = es.eigenvalues();
    return lam(0) > tol.rank_rel * lam(lam.size() - 1);
}

} // namespace

RealMatrix linear_invariants(const RealMatrix& h, const Tolerance& tol) {
    if (h.rows() != h.cols()) throw Error(ErrorCode::NotSquare, "Hamiltonian matrix must be square");
    if (h.rows() % 2 != 0) throw Error(ErrorCode::OddDimension, "phase space dimension must be even");
    const double scale = h.size() > 0 ? h.cwiseAbs().maxCoeff() : 0.0;
    const RealMatrix hb = scale > 0.0 ? RealMatrix(h / scale) : h;
    RealMatrix f = canonical_j(h.rows() / 2) * rank_kernel(hb, tol).basis;
    fix_column_signs(f);
    return f;
}

bool quadratic_commutant_check(const RealMatrix& h, const RealMatrix& b, const Tolerance& tol) {
    require_symmetric(b, tol);
    if (h.rows() != b.rows() || h.cols() != b.cols())
        throw Error(ErrorCode::InvalidArgument, "quadratic form does not match the Hamiltonian size");
    if (h.rows() % 2 != 0) throw Error(ErrorCode::OddDimension, "phase space dimension must be even");
    const RealMatrix j = canonical_j(h.rows() / 2);
    const RealMatrix jh = j * h;
    const RealMatrix jb = j * b;
    const double comm = (jh * jb - jb * jh).norm();
    return comm <= tol.verify_abs * jh.norm() * jb.norm();
}

std::vector<RealMatrix> quadratic_invariant_basis(const RealMatrix& h, const Tolerance& tol) {
    if (!check_psd(h, tol) || !positive_definite(h, tol))
        throw Error(ErrorCode::NotPositiveDefinite,
                    "quadratic invariants are only enumerated for positive-definite Hamiltonians");
    const NormalForm nf = normal_form(h, tol);
    const Index dim = h.rows();
    const Index m = nf.classification.n_ho;
    const double wmax = m > 0 ? nf.omega(0) : 0.0;
    std::vector<RealMatrix> out;

    auto emit = [&](const RealMatrix& by) {
        RealMatrix bx = nf.s_inv.transpose() * by * nf.s_inv;
        bx = 0.5 * (bx + bx.transpose());
        out.push_back(bx / bx.norm());
    };

    Index start = 0;
    while (start < m) {
        Index stop = start + 1;
        while (stop < m && nf.omega(stop - 1) - nf.omega(stop) <= tol.degeneracy_rel * wmax) ++stop;
        // Blocks [[N, -M], [M, N]] with N symmetric, M antisymmetric.
        for (Index a = start; a < stop; ++a)
            for (Index b = a; b < stop; ++b) {
                RealMatrix by = RealMatrix::Zero(dim, dim);
                const Index qa = nf.eps_offset() + a, qb = nf.eps_offset() + b;
                const Index pa = nf.fps_offset() + a, pb = nf.fps_offset() + b;
                by(qa, qb) = by(qb, qa) = 1.0;
                by(pa, pb) = by(pb, pa) = 1.0;
                emit(by);
            }
        for (Index a = start; a < stop; ++a)
            for (Index b = a + 1; b < stop; ++b) {
                RealMatrix by = RealMatrix::Zero(dim, dim);
                const Index qa = nf.eps_offset() + a, qb = nf.eps_offset() + b;
                const Index pa = nf.fps_offset() + a, pb = nf.fps_offset() + b;
                by(qa, pb) = by(pb, qa) = -1.0;
                by(qb, pa) = by(pa, qb) = 1.0;
                emit(by);
            }
        start = stop;
    }
    return out;
}

InvariantSet invariants(const RealMatrix& h, const Tolerance& tol) {
    InvariantSet out;
    out.linear = linear_invariants(h, tol);
    if (check_psd(h, tol) && positive_definite(h, tol)) out.quadratic = quadratic_invariant_basis(h, tol);
    return out;
}

} // namespace symq
