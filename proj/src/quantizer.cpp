#include "symq/quantizer.hpp"

#include "symq/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace symq {

namespace {

std::vector<Index> junction_fluxes(const HamiltonianSystem& hs) {
    std::vector<Index> out;
    for (const auto& term : hs.potential)
        if (std::find(out.begin(), out.end(), term.coordinate) == out.end()) out.push_back(term.coordinate);
    return out;
}

ComplexMatrix complex_couplings(const RealMatrix& g, const RealMatrix& m) {
    ComplexMatrix out(g.rows(), g.cols());
    for (Index a = 0; a < g.rows(); ++a)
        for (Index b = 0; b < g.cols(); ++b) out(a, b) = std::complex<double>(g(a, b), -m(a, b)) / std::sqrt(2.0);
    return out;
}

// Rotates oscillator pair k of a normal form by angle theta (e' = c e + s f, f' = -s e + c f).
void rotate_pair(NormalForm& nf, Index k, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const Index ie = nf.eps_offset() + k, jf = nf.fps_offset() + k;
    const RealVector e = nf.s.col(ie), f = nf.s.col(jf);
    nf.s.col(ie) = c * e + s * f;
    nf.s.col(jf) = -s * e + c * f;
    const RealVector re = nf.s_inv.row(ie).transpose(), rf = nf.s_inv.row(jf).transpose();
    nf.s_inv.row(ie) = (c * re + s * rf).transpose();
    nf.s_inv.row(jf) = (-s * re + c * rf).transpose();
}

void require_linearizable(const HamiltonianSystem& hs, const QuantizeOptions& options) {
    for (const auto& term : hs.potential) {
        if (term.compact && !options.transmon_override)
            throw Error(ErrorCode::CompactVariableRefused,
                        "junction '" + term.name +
                            "' has a compact phase; linearizing it is only valid in the transmon regime "
                            "(pass the transmon override to proceed)");
    }
}

} // namespace

std::vector<TaylorTerm> cosine_tail(int max_order) {
    std::vector<TaylorTerm> out;
    long long factorial = 24; // 4!
    for (int order = 4; order <= max_order; order += 2) {
        if (order > 4) factorial *= static_cast<long long>(order - 1) * order;
        const int m = order / 2;
        out.push_back({order, m % 2 == 1 ? 1 : -1, factorial});
    }
    return out;
}

QuantizedModel two_tier(const HamiltonianSystem& hs, const QuantizeOptions& options) {
    const Tolerance& tol = options.tol;
    const Index n = hs.layout.n;
    for (const auto& term : hs.potential) {
        if (term.kind != NonlinearKind::Josephson)
            throw Error(ErrorCode::Precondition,
                        "two-tier quantization supports Josephson junctions only; '" + term.name +
                            "' is a phase-slip junction");
    }
    const std::vector<Index> jpos = junction_fluxes(hs);
    const double scale = std::max(1.0, hs.h.norm());
    for (Index f : jpos) {
        if (hs.h.row(f).norm() > tol.verify_abs * scale)
            throw Error(ErrorCode::Precondition,
                        "junction flux '" + hs.coordinates[static_cast<size_t>(f)].label +
                            "' appears in the quadratic part; apply the charge shift first");
    }

    std::vector<Index> ypos;
    for (Index i = 0; i < n; ++i)
        if (std::find(jpos.begin(), jpos.end(), i) == jpos.end()) ypos.push_back(i);
    const Index m = static_cast<Index>(ypos.size());
    const Index nj = static_cast<Index>(jpos.size());
    std::vector<Index> yidx = ypos;
    for (Index i : ypos) yidx.push_back(i + n);

    RealMatrix hy(2 * m, 2 * m);
    for (Index a = 0; a < 2 * m; ++a)
        for (Index b = 0; b < 2 * m; ++b) hy(a, b) = hs.h(yidx[static_cast<size_t>(a)], yidx[static_cast<size_t>(b)]);

    QuantizedModel model;
    model.route = QuantizationRoute::TwoTier;
    model.normal_form = normal_form(hy, tol, NormalFormOptions{true});
    NormalForm& nf = model.normal_form;
    const auto& cls = nf.classification;

    // Coupling of every sector column to the junction momenta.
    RealMatrix h_int(2 * m, nj);
    for (Index a = 0; a < 2 * m; ++a)
        for (Index k = 0; k < nj; ++k) h_int(a, k) = hs.h(yidx[static_cast<size_t>(a)], jpos[static_cast<size_t>(k)] + n);

    // Gauge each oscillator so its coupling to the last coupled junction is real and positive.
    const double coupling_floor = tol.verify_abs * std::max(1.0, h_int.norm());
    for (Index k = 0; k < cls.n_ho; ++k) {
        const RealVector g = nf.s.col(nf.eps_offset() + k).transpose() * h_int;
        const RealVector mm = nf.s.col(nf.fps_offset() + k).transpose() * h_int;
        for (Index j = nj - 1; j >= 0; --j) {
            if (std::hypot(g(j), mm(j)) > coupling_floor) {
                rotate_pair(nf, k, std::atan2(mm(j), g(j)));
                break;
            }
        }
    }

    // Canonical partial transform: positions (W_q, E, Eps, Phi_J), momenta (W_p, F, Fps, Pi_J).
    PartialLayout layout{cls.n_nd, cls.n_f, cls.n_ho, nj};
    const Index np = layout.n();
    RealMatrix sy(2 * m, 2 * m);
    Index col = 0;
    auto take = [&](Index from, Index count) {
        for (Index c = 0; c < count; ++c) sy.col(col++) = nf.s.col(from + c);
    };
    take(nf.w_offset(), cls.n_nd);
    take(nf.e_offset(), cls.n_f);
    take(nf.eps_offset(), cls.n_ho);
    take(nf.w_offset() + cls.n_nd, cls.n_nd);
    take(nf.f_offset(), cls.n_f);
    take(nf.fps_offset(), cls.n_ho);

    RealMatrix t = RealMatrix::Zero(2 * n, 2 * n);
    const Index ny = m; // positions of the diagonalized sector
    for (Index c = 0; c < 2 * m; ++c) {
        const Index target = c < ny ? c : c + nj; // leave room for the junction positions
        for (Index r = 0; r < 2 * m; ++r) t(yidx[static_cast<size_t>(r)], target) = sy(r, c);
    }
    for (Index k = 0; k < nj; ++k) {
        t(jpos[static_cast<size_t>(k)], layout.junction_position(k)) = 1.0;
        t(jpos[static_cast<size_t>(k)] + n, layout.junction_momentum(k)) = 1.0;
    }
    model.transform = t;
    model.partial = layout;
    model.quadratic = t.transpose() * hs.h * t;
    model.quadratic = 0.5 * (model.quadratic + model.quadratic.transpose()).eval();

    const RealMatrix j = canonical_j(np);
    const double defect = (t.transpose() * j * t - j).norm();
    const double bound = tol.verify_abs * std::max(1.0, t.squaredNorm());
    if (defect > bound) throw VerificationFailure("partial transform T^T J T = J", defect, bound);

    model.mode_freqs = nf.omega;
    model.coupling_g = RealMatrix::Zero(cls.n_ho, nj);
    model.coupling_m = RealMatrix::Zero(cls.n_ho, nj);
    for (Index k = 0; k < cls.n_ho; ++k) {
        for (Index q = 0; q < nj; ++q) {
            model.coupling_g(k, q) = model.quadratic(layout.ho_position(k), layout.junction_momentum(q));
            model.coupling_m(k, q) = model.quadratic(layout.ho_momentum(k), layout.junction_momentum(q));
        }
    }
    // Entries at rounding level are exact zeros after the gauge rotation.
    model.coupling_g = model.coupling_g.unaryExpr([&](double v) { return std::abs(v) > coupling_floor ? v : 0.0; });
    model.coupling_m = model.coupling_m.unaryExpr([&](double v) { return std::abs(v) > coupling_floor ? v : 0.0; });
    model.couplings = complex_couplings(model.coupling_g, model.coupling_m);

    double nd_norm = 0.0, free_norm = 0.0;
    for (Index q = 0; q < nj; ++q) {
        const Index col_j = layout.junction_momentum(q);
        for (Index k = 0; k < cls.n_nd; ++k)
            nd_norm = std::hypot(nd_norm, std::hypot(model.quadratic(k, col_j), model.quadratic(np + k, col_j)));
        for (Index k = 0; k < cls.n_f; ++k)
            free_norm = std::hypot(free_norm, std::hypot(model.quadratic(cls.n_nd + k, col_j),
                                                         model.quadratic(np + cls.n_nd + k, col_j)));
    }
    model.nd_coupling = nd_norm > coupling_floor;
    if (model.nd_coupling)
        model.warnings.push_back("junction momenta couple to the nondynamical sector of the linear part");
    if (free_norm > coupling_floor)
        model.warnings.push_back("junction momenta couple to free particles of the linear part");

    model.mode_expressions = RealMatrix::Zero(nj, 2 * np);
    for (size_t q = 0; q < hs.potential.size(); ++q) {
        const auto& term = hs.potential[q];
        JunctionTerm jt{term.name, term.kind, term.energy, t.transpose() * term.covector, true, {}};
        model.mode_expressions.row(static_cast<Index>(q)) = jt.covector.transpose();
        model.junction_terms.push_back(std::move(jt));
    }
    model.nd_dependency.assign(static_cast<size_t>(nj), false);
    for (Index q = 0; q < nj; ++q) {
        const RealVector row = model.mode_expressions.row(q).transpose();
        for (Index k = 0; k < cls.n_nd; ++k)
            if (std::abs(row(k)) > tol.verify_abs * row.norm() || std::abs(row(np + k)) > tol.verify_abs * row.norm())
                model.nd_dependency[static_cast<size_t>(q)] = true;
    }
    return model;
}

QuantizedModel blackbox(const HamiltonianSystem& hs, const QuantizeOptions& options) {
    require_linearizable(hs, options);
    const Tolerance& tol = options.tol;
    RealMatrix h = hs.h;
    for (const auto& term : hs.potential) h += term.energy * term.covector * term.covector.transpose();

    QuantizedModel model;
    model.route = QuantizationRoute::BlackBox;
    model.normal_form = normal_form(h, tol, NormalFormOptions{options.symplectic_w});
    const NormalForm& nf = model.normal_form;
    model.mode_freqs = nf.omega;
    model.transform = nf.s;
    model.quadratic = h;

    const Index nj = static_cast<Index>(hs.potential.size());
    const Index n_ho = nf.classification.n_ho;
    model.coupling_g = RealMatrix::Zero(n_ho, nj);
    model.coupling_m = RealMatrix::Zero(n_ho, nj);
    model.couplings = complex_couplings(model.coupling_g, model.coupling_m);

    const Index w_cols = 2 * nf.classification.n_nd;
    model.mode_expressions = RealMatrix::Zero(nj, nf.s.cols());
    model.nd_dependency.assign(static_cast<size_t>(nj), false);
    for (Index q = 0; q < nj; ++q) {
        const auto& term = hs.potential[static_cast<size_t>(q)];
        const RealVector row = nf.s.transpose() * term.covector;
        model.mode_expressions.row(q) = row.transpose();
        const double floor = tol.verify_abs * std::max(1.0, row.norm());
        model.nd_dependency[static_cast<size_t>(q)] = w_cols > 0 && row.head(w_cols).cwiseAbs().maxCoeff() > floor;
        model.junction_terms.push_back({term.name, term.kind, term.energy, row, false, cosine_tail()});
    }
    for (Index q = 0; q < nj; ++q) {
        if (!model.nd_dependency[static_cast<size_t>(q)]) continue;
        model.warnings.push_back("junction '" + hs.potential[static_cast<size_t>(q)].name +
                                 "' depends on the nondynamical sector; the black-box expansion does not "
                                 "isolate the low-energy dynamics here and the two-tier route is preferred");
    }
    return model;
}

CrossValidation cross_validate(const QuantizedModel& two_tier_model, const QuantizedModel& blackbox_model,
                               double tolerance, const Tolerance& tol) {
    if (two_tier_model.route != QuantizationRoute::TwoTier || blackbox_model.route != QuantizationRoute::BlackBox)
        throw Error(ErrorCode::InvalidArgument, "cross_validate expects a two-tier and a black-box model");
    RealMatrix h = two_tier_model.quadratic;
    for (const auto& term : two_tier_model.junction_terms) h += term.energy * term.covector * term.covector.transpose();

    CrossValidation report;
    report.two_tier_freqs = normal_form(h, tol).omega;
    report.blackbox_freqs = blackbox_model.mode_freqs;
    if (report.two_tier_freqs.size() != report.blackbox_freqs.size()) {
        std::ostringstream os;
        os << "mode count differs: two-tier " << report.two_tier_freqs.size() << ", black-box "
           << report.blackbox_freqs.size();
        throw Error(ErrorCode::MismatchBeyondTolerance, os.str());
    }
    report.deltas = (report.two_tier_freqs - report.blackbox_freqs).cwiseAbs();
    report.max_delta = report.deltas.size() ? report.deltas.maxCoeff() : 0.0;
    if (report.max_delta > tolerance) {
        std::ostringstream os;
        os << "frequency mismatch " << report.max_delta << " exceeds " << tolerance;
        throw Error(ErrorCode::MismatchBeyondTolerance, os.str());
    }
    return report;
}

RealMatrix reconstruct_quadratic(const QuantizedModel& model, bool linearize) {
    if (model.route != QuantizationRoute::TwoTier)
        throw Error(ErrorCode::InvalidArgument, "reconstruction needs a two-tier model");
    const PartialLayout& p = model.partial;
    const Index k = p.n_ho, nj = p.n_j, dof = k + nj;
    // Source indices in the partial coordinates for (y, Phi_J) and (pi, Pi_J).
    std::vector<Index> src;
    for (Index a = 0; a < k; ++a) src.push_back(p.ho_position(a));
    for (Index a = 0; a < nj; ++a) src.push_back(p.junction_position(a));
    for (Index a = 0; a < k; ++a) src.push_back(p.ho_momentum(a));
    for (Index a = 0; a < nj; ++a) src.push_back(p.junction_momentum(a));

    RealMatrix h = RealMatrix::Zero(2 * dof, 2 * dof);
    for (Index a = 0; a < k; ++a) {
        h(a, a) = model.mode_freqs(a);
        h(dof + a, dof + a) = model.mode_freqs(a);
        for (Index q = 0; q < nj; ++q) {
            h(a, dof + k + q) = h(dof + k + q, a) = model.coupling_g(a, q);
            h(dof + a, dof + k + q) = h(dof + k + q, dof + a) = model.coupling_m(a, q);
        }
    }
    // Junction block, taken as is.
    for (Index a = 0; a < nj; ++a) {
        for (Index b = 0; b < nj; ++b) {
            const std::array<Index, 2> rows{k + a, dof + k + a}, cols{k + b, dof + k + b};
            for (Index r : rows)
                for (Index c : cols) h(r, c) = model.quadratic(src[static_cast<size_t>(r)], src[static_cast<size_t>(c)]);
        }
    }
    if (linearize) {
        for (const auto& term : model.junction_terms) {
            RealVector c(2 * dof);
            for (Index r = 0; r < 2 * dof; ++r) c(r) = term.covector(src[static_cast<size_t>(r)]);
            h += term.energy * c * c.transpose();
        }
    }
    return h;
}

} // namespace symq
