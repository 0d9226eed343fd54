#include "symq/williamson.hpp"

#include "symq/error.hpp"

#include <algorithm>
#include <cmath>

namespace symq {

namespace {

void require_phase_space(const RealMatrix& h) {
    if (h.rows() != h.cols()) throw Error(ErrorCode::NotSquare, "Hamiltonian matrix must be square");
    if (h.rows() % 2 != 0)
        throw Error(ErrorCode::OddDimension, "phase space dimension must be even");
    require_finite(h, "Hamiltonian matrix");
}

void require_matching_j(const RealMatrix& h, const RealMatrix& j) {
    if (j.rows() != h.rows() || j.cols() != h.cols())
        throw Error(ErrorCode::InvalidArgument, "symplectic form does not match the Hamiltonian size");
}

double max_abs(const RealMatrix& m) { return m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0; }

double spectral_norm(const RealMatrix& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<RealMatrix>(m).singularValues()(0);
}

RealMatrix leading_left_singular(const RealMatrix& m, Index k) {
    if (k == 0 || m.cols() == 0) return RealMatrix(m.rows(), 0);
    Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeThinU);
    if (svd.matrixU().cols() < k)
        throw Error(ErrorCode::VerificationFailure, "subspace has fewer directions than expected");
    RealMatrix u = svd.matrixU().leftCols(k);
    fix_column_signs(u);
    return u;
}

// Removes from x its symplectic components along the pairs (e_b, f_b), b < count.
RealVector symplectic_complement(const RealVector& x, const RealMatrix& j, const RealMatrix& e,
                                 const RealMatrix& f, Index count) {
    RealVector out = x;
    const RealVector jx = j.transpose() * x; // <x, J y> = (J^T x) . y
    for (Index b = 0; b < count; ++b) {
        out -= jx.dot(f.col(b)) * e.col(b);
        out += jx.dot(e.col(b)) * f.col(b);
    }
    return out;
}

// Fixes the rotation freedom of an oscillator pair: at the heaviest coordinate
// e is positive and f vanishes.
void fix_pair_phase(RealMatrix& e, RealMatrix& f, Index col) {
    const RealVector weight = e.col(col).cwiseAbs2() + f.col(col).cwiseAbs2();
    const double wmax = weight.maxCoeff();
    Index pivot = 0;
    while (pivot < weight.size() && weight(pivot) < (1.0 - 1e-6) * wmax) ++pivot;
    const double theta = std::atan2(f(pivot, col), e(pivot, col));
    const double c = std::cos(theta), s = std::sin(theta);
    const RealVector ec = e.col(col);
    e.col(col) = c * ec + s * f.col(col);
    f.col(col) = -s * ec + c * f.col(col);
    f(pivot, col) = 0.0;
}

HarmonicPairs harmonic_sector(const RealMatrix& h, const RealMatrix& j, const Tolerance& tol,
                              Index n_ho) {
    const Index dim = h.rows();
    HarmonicPairs out{RealMatrix(dim, n_ho), RealMatrix(dim, n_ho), RealVector(n_ho)};
    if (n_ho == 0) return out;

    Eigen::SelfAdjointEigenSolver<RealMatrix> hs(0.5 * (h + h.transpose()));
    if (hs.info() != Eigen::Success)
        throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver did not converge");
    const RealVector& lam = hs.eigenvalues();
    const double lmax = lam(dim - 1);
    Index first = 0;
    while (first < dim && !(lam(first) > tol.rank_rel * lmax)) ++first;
    const Index r = dim - first;

    // H = B^T B and the nonzero spectrum of JH coincides with that of A = B J B^T.
    const RealMatrix b =
        lam.tail(r).cwiseSqrt().asDiagonal() * hs.eigenvectors().rightCols(r).transpose();
    RealMatrix a = b * j * b.transpose();
    a = 0.5 * (a - a.transpose());

    Eigen::SelfAdjointEigenSolver<RealMatrix> as(a.transpose() * a);
    if (as.info() != Eigen::Success)
        throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver did not converge");
    const Index m = 2 * n_ho;
    if (r < m) throw Error(ErrorCode::VerificationFailure, "harmonic sector larger than rank of H");

    // Candidates in descending frequency order.
    std::vector<double> omega(static_cast<size_t>(m));
    RealMatrix u(r, m);
    for (Index k = 0; k < m; ++k) {
        const Index src = r - 1 - k;
        omega[static_cast<size_t>(k)] = std::sqrt(std::max(0.0, as.eigenvalues()(src)));
        u.col(k) = as.eigenvectors().col(src);
    }
    const double wmax = omega.front();
    if (!(omega.back() > tol.rank_rel * wmax) || omega.back() <= 0.0)
        throw Error(ErrorCode::VerificationFailure, "harmonic frequency collapsed to zero");

    const RealMatrix jbt = j * b.transpose();
    Index done = 0;
    Index start = 0;
    while (start < m) {
        Index stop = start + 1;
        while (stop < m &&
               omega[static_cast<size_t>(stop - 1)] - omega[static_cast<size_t>(stop)] <=
                   tol.degeneracy_rel * wmax)
            ++stop;
        const Index size = stop - start;
        if (size % 2 != 0)
            throw Error(ErrorCode::VerificationFailure,
                        "frequency cluster has odd multiplicity; adjust the degeneracy tolerance");

        // Phase-space candidates: f~ = J B^T u, e~ = J B^T A u / omega.
        std::vector<RealVector> et, ft;
        for (Index k = start; k < stop; ++k) {
            ft.emplace_back(jbt * u.col(k));
            et.emplace_back(jbt * (a * u.col(k)) / omega[static_cast<size_t>(k)]);
        }
        std::vector<bool> used(static_cast<size_t>(size), false);
        const Index base = done;
        for (Index pair = 0; pair < size / 2; ++pair) {
            // Pivot on the candidate with the largest remaining symplectic norm.
            Index best = -1;
            double best_norm = 0.0;
            RealVector best_e, best_f;
            for (Index c = 0; c < size; ++c) {
                if (used[static_cast<size_t>(c)]) continue;
                RealVector eh = symplectic_complement(et[static_cast<size_t>(c)], j,
                                                      out.e.middleCols(base, pair),
                                                      out.f.middleCols(base, pair), pair);
                RealVector fh = symplectic_complement(ft[static_cast<size_t>(c)], j,
                                                      out.e.middleCols(base, pair),
                                                      out.f.middleCols(base, pair), pair);
                const double nrm = symplectic_product(eh, j, fh);
                if (nrm > best_norm) {
                    best = c;
                    best_norm = nrm;
                    best_e = std::move(eh);
                    best_f = std::move(fh);
                }
            }
            const double ref = symplectic_product(et[0], j, ft[0]);
            if (best < 0 || !(best_norm > 1e-6 * std::abs(ref)))
                throw Error(ErrorCode::VerificationFailure,
                            "degenerate harmonic cluster lacks independent pairs");
            used[static_cast<size_t>(best)] = true;
            const double scale = 1.0 / std::sqrt(best_norm);
            out.e.col(done) = best_e * scale;
            out.f.col(done) = best_f * scale;
            fix_pair_phase(out.e, out.f, done);
            const double he = out.e.col(done).dot(h * out.e.col(done));
            const double hf = out.f.col(done).dot(h * out.f.col(done));
            out.omega(done) = 0.5 * (he + hf);
            ++done;
        }
        start = stop;
    }
    return out;
}

} // namespace

RealMatrix NormalForm::expected_h_diag() const {
    const Index dim = s.cols();
    RealMatrix d = RealMatrix::Zero(dim, dim);
    for (Index i = 0; i < classification.n_f; ++i) d(f_offset() + i, f_offset() + i) = 1.0;
    for (Index a = 0; a < classification.n_ho; ++a) {
        d(eps_offset() + a, eps_offset() + a) = omega(a);
        d(fps_offset() + a, fps_offset() + a) = omega(a);
    }
    return d;
}

RealMatrix NormalForm::expected_j_form() const {
    const Index dim = s.cols();
    RealMatrix k = RealMatrix::Zero(dim, dim);
    const Index nw = 2 * classification.n_nd;
    k.topLeftCorner(nw, nw) = w_block;
    for (Index i = 0; i < classification.n_f; ++i) {
        k(e_offset() + i, f_offset() + i) = 1.0;
        k(f_offset() + i, e_offset() + i) = -1.0;
    }
    for (Index a = 0; a < classification.n_ho; ++a) {
        k(eps_offset() + a, fps_offset() + a) = 1.0;
        k(fps_offset() + a, eps_offset() + a) = -1.0;
    }
    return k;
}

RealMatrix NormalForm::generator() const {
    const Index dim = s.cols();
    RealMatrix d = RealMatrix::Zero(dim, dim);
    for (Index i = 0; i < classification.n_f; ++i) d(e_offset() + i, f_offset() + i) = 1.0;
    for (Index a = 0; a < classification.n_ho; ++a) {
        d(eps_offset() + a, fps_offset() + a) = omega(a);
        d(fps_offset() + a, eps_offset() + a) = -omega(a);
    }
    return d;
}

RealMatrix canonical_j(Index n) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative degree-of-freedom count");
    RealMatrix j = RealMatrix::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n).setIdentity();
    j.bottomLeftCorner(n, n) = -RealMatrix::Identity(n, n);
    return j;
}

bool check_psd(const RealMatrix& h, const Tolerance& tol) {
    require_phase_space(h);
    if (h.size() == 0) return true;
    const double scale = max_abs(h);
    if (scale == 0.0) return true;
    const RealMatrix hb = h / scale;
    if (max_abs(hb - hb.transpose()) > tol.verify_abs) return false;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (hb + hb.transpose()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver did not converge");
    const double lmax = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
    return es.eigenvalues()(0) >= -tol.verify_abs * lmax;
}

DofClassification classify_dof(const RealMatrix& h, const Tolerance& tol) {
    if (!check_psd(h, tol))
        throw Error(ErrorCode::NotPSD, "Hamiltonian matrix is not positive semidefinite");
    const Index dim = h.rows();
    const Index n = dim / 2;
    DofClassification out;
    const double scale = max_abs(h);
    if (scale == 0.0) {
        out.n_nd = n;
        out.k1_basis = RealMatrix::Identity(dim, dim);
        out.k2_basis = out.k1_basis;
        return out;
    }
    const RealMatrix hb = h / scale;
    const double ref = spectral_norm(hb);
    const RealMatrix j = canonical_j(n);

    out.k1_basis = rank_kernel(hb, tol, ref).basis;
    // (JH)^2 x = 0  <=>  H x lies in J ker H.
    const RealMatrix jk1 = j * out.k1_basis;
    const RealMatrix proj = RealMatrix::Identity(dim, dim) - jk1 * jk1.transpose();
    out.k2_basis = rank_kernel(proj * hb, tol, ref).basis;

    const Index d1 = out.k1_basis.cols();
    const Index d2 = out.k2_basis.cols();
    out.n_f = d2 - d1;
    if (out.n_f < 0 || (d1 - out.n_f) % 2 != 0 || d1 < out.n_f)
        throw Error(ErrorCode::VerificationFailure,
                    "kernel dimensions are inconsistent (dim K1 = " + std::to_string(d1) +
                        ", dim K2 = " + std::to_string(d2) + ")");
    out.n_nd = (d1 - out.n_f) / 2;
    out.n_ho = n - out.n_f - out.n_nd;
    return out;
}

SymplecticPairs free_particle_pairs(const RealMatrix& h, const RealMatrix& j,
                                    const DofClassification& cls, const Tolerance& tol) {
    require_phase_space(h);
    require_matching_j(h, j);
    const Index dim = h.rows();
    const Index nf = cls.n_f;
    SymplecticPairs out{RealMatrix(dim, nf), RealMatrix(dim, nf)};
    if (nf == 0) return out;

    const RealMatrix jh = j * h;
    // E = JH[K2], spanned by the images of the Jordan chains.
    const RealMatrix et = leading_left_singular(jh * cls.k2_basis, nf);

    // Minimum-norm chain solve JH f~ = e~ with the rank fixed by the classification.
    Eigen::JacobiSVD<RealMatrix> svd(jh, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Index rank = dim - cls.k1_basis.cols();
    const RealVector& sv = svd.singularValues();
    RealMatrix ft = svd.matrixV().leftCols(rank) *
                    (sv.head(rank).cwiseInverse().asDiagonal() *
                     (svd.matrixU().leftCols(rank).transpose() * et));
    const double chain_residual = (jh * ft - et).norm();
    if (chain_residual > std::sqrt(tol.verify_abs) * (1.0 + ft.norm() * sv(0)))
        throw Error(ErrorCode::DegenerateNormalization,
                    "Jordan chain solve failed (residual " + std::to_string(chain_residual) + ")");

    for (Index i = 0; i < nf; ++i) {
        const RealVector e_t = et.col(i);
        const RealVector f_t = ft.col(i);
        const RealVector je_t = j.transpose() * e_t;
        const RealVector jf_t = j.transpose() * f_t;
        RealVector e_hat = e_t;
        RealVector f_hat = f_t;
        double norm = f_t.dot(h * f_t);
        for (Index b = 0; b < i; ++b) {
            const double c = je_t.dot(out.f.col(b)); // <e~_I, J f_J>
            e_hat -= c * out.e.col(b);
            f_hat -= jf_t.dot(out.f.col(b)) * out.e.col(b);
            f_hat += jf_t.dot(out.e.col(b)) * out.f.col(b);
            norm -= c * symplectic_product(out.e.col(b), j, f_t);
        }
        if (!(norm > tol.verify_abs * e_hat.norm() * f_hat.norm()))
            throw Error(ErrorCode::DegenerateNormalization,
                        "free-particle normalization is not positive (" + std::to_string(norm) + ")");
        const double a = 1.0 / std::sqrt(norm);
        out.e.col(i) = a * e_hat;
        out.f.col(i) = a * f_hat;
    }
    return out;
}

RealMatrix nondynamical_block(const RealMatrix& h, const RealMatrix& j, const DofClassification& cls,
                              const SymplecticPairs& free, const Tolerance& tol) {
    require_phase_space(h);
    require_matching_j(h, j);
    const Index dim = h.rows();
    const Index k = 2 * cls.n_nd;
    if (k == 0) return RealMatrix(dim, 0);
    RealMatrix k1 = cls.k1_basis;
    if (free.e.cols() > 0) {
        const RealMatrix eo = orthonormal_span(free.e, tol);
        k1 -= eo * (eo.transpose() * k1);
    }
    const RealMatrix wt = leading_left_singular(k1, k);
    if (free.f.cols() == 0) return wt;
    // Remove the symplectic projection on the free-particle momenta.
    return wt + free.e * (free.f.transpose() * j * wt);
}

HarmonicPairs harmonic_pairs(const RealMatrix& h, const RealMatrix& j, const Tolerance& tol) {
    require_phase_space(h);
    require_matching_j(h, j);
    const DofClassification cls = classify_dof(h, tol);
    return harmonic_sector(h, j, tol, cls.n_ho);
}

RealMatrix symplectify(const RealMatrix& w, const RealMatrix& j) {
    const Index k = w.cols();
    if (k % 2 != 0) throw Error(ErrorCode::InvalidArgument, "nondynamical block must have even width");
    std::vector<RealVector> rest;
    for (Index c = 0; c < k; ++c) rest.emplace_back(w.col(c));
    RealMatrix q(w.rows(), k / 2), p(w.rows(), k / 2);
    for (Index pair = 0; pair < k / 2; ++pair) {
        size_t bi = 0, bj = 1;
        double best = -1.0;
        for (size_t a = 0; a < rest.size(); ++a)
            for (size_t b = a + 1; b < rest.size(); ++b) {
                const double v = std::abs(symplectic_product(rest[a], j, rest[b]));
                if (v > best) { best = v; bi = a; bj = b; }
            }
        double v = symplectic_product(rest[bi], j, rest[bj]);
        if (!(std::abs(v) > 1e-12)) throw Error(ErrorCode::VerificationFailure, "nondynamical block is degenerate");
        RealVector qa = rest[bi], pa = rest[bj];
        if (v < 0.0) { std::swap(qa, pa); v = -v; }
        qa /= std::sqrt(v);
        pa /= std::sqrt(v);
        q.col(pair) = qa;
        p.col(pair) = pa;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(bj));
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(bi));
        for (auto& x : rest) {
            const RealVector jx = j.transpose() * x;
            x = x - jx.dot(pa) * qa + jx.dot(qa) * pa;
        }
    }
    RealMatrix out(w.rows(), k);
    out << q, p;
    return out;
}

NormalForm normal_form(const RealMatrix& h, const Tolerance& tol, const NormalFormOptions& options) {
    tol.validate();
    require_phase_space(h);
    if (!check_psd(h, tol))
        throw Error(ErrorCode::NotPSD, "Hamiltonian matrix is not positive semidefinite");
    const Index dim = h.rows();
    const Index n = dim / 2;
    const RealMatrix j = canonical_j(n);
    const double scale = max_abs(h);
    const RealMatrix hb = scale > 0.0 ? RealMatrix(h / scale) : h;

    NormalForm nf;
    nf.classification = classify_dof(hb, tol);
    const auto& cls = nf.classification;
    SymplecticPairs free = free_particle_pairs(hb, j, cls, tol);
    RealMatrix w = nondynamical_block(hb, j, cls, free, tol);
    if (options.symplectic_w) w = symplectify(w, j);
    HarmonicPairs osc = harmonic_sector(hb, j, tol, cls.n_ho);

    // Undo the balancing: frequencies scale with H, chains split the factor.
    if (scale > 0.0) {
        free.e *= std::sqrt(scale);
        free.f /= std::sqrt(scale);
        osc.omega *= scale;
    }

    nf.s.resize(dim, dim);
    nf.s << w, free.e, free.f, osc.e, osc.f;
    nf.omega = osc.omega;
    nf.w_block = w.transpose() * j * w;

    const Index nw = w.cols();
    RealMatrix kinv = RealMatrix::Zero(dim, dim);
    if (nw > 0) kinv.topLeftCorner(nw, nw) = nf.w_block.inverse();
    for (Index i = 0; i < cls.n_f; ++i) {
        kinv(nf.e_offset() + i, nf.f_offset() + i) = -1.0;
        kinv(nf.f_offset() + i, nf.e_offset() + i) = 1.0;
    }
    for (Index a = 0; a < cls.n_ho; ++a) {
        kinv(nf.eps_offset() + a, nf.fps_offset() + a) = -1.0;
        kinv(nf.fps_offset() + a, nf.eps_offset() + a) = 1.0;
    }
    nf.s_inv = kinv * nf.s.transpose() * j;
    nf.h_diag = nf.s.transpose() * h * nf.s;

    nf.residuals.h = (nf.h_diag - nf.expected_h_diag()).norm();
    nf.residuals.j = (nf.s.transpose() * j * nf.s - nf.expected_j_form()).norm();
    const double s2 = std::max(1.0, nf.s.squaredNorm());
    const double bound_h = tol.verify_abs * std::max(1.0, h.norm()) * s2;
    const double bound_j = tol.verify_abs * s2;
    if (nf.residuals.h > bound_h) throw VerificationFailure("S^T H S = H_D", nf.residuals.h, bound_h);
    if (nf.residuals.j > bound_j) throw VerificationFailure("S^T J S = K", nf.residuals.j, bound_j);
    return nf;
}

} // namespace symq
