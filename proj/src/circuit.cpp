#include "symq/circuit.hpp"

#include "symq/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace symq {

namespace {

using NameIndex = std::map<std::string, Index>;

NameIndex index_by_name(const auto& elements) {
    NameIndex out;
    for (size_t i = 0; i < elements.size(); ++i) out.emplace(elements[i].name, static_cast<Index>(i));
    return out;
}

Index lookup(const NameIndex& names, const std::string& name) {
    const auto it = names.find(name);
    if (it == names.end()) throw Error(ErrorCode::UnknownReference, "unknown element '" + name + "'");
    return it->second;
}

// Throws the first validation error as a located exception.
void require_buildable(const Netlist& netlist) {
    for (const auto& d : validate(netlist)) {
        if (d.severity != Severity::Error) continue;
        const ErrorCode code =
            d.code == "UnsupportedElement" ? ErrorCode::UnsupportedElement : ErrorCode::InvalidNetlist;
        throw SourceError(code, d.loc.line, d.loc.col, d.message);
    }
}

double frobenius_bound(const RealMatrix& m) { return std::max(1.0, m.norm()); }

} // namespace

PhaseSpaceLayout CircuitSystem::layout() const {
    PhaseSpaceLayout out;
    out.n = n();
    out.labels.resize(static_cast<size_t>(2 * n()));
    for (size_t i = 0; i < registry.size(); ++i) {
        const auto& coord = registry[i];
        out.labels[i] = coord.label;
        out.labels[i + registry.size()] = (coord.kind == CoordinateKind::Charge ? "P_" : "Pi_") + coord.element;
    }
    return out;
}

std::vector<Index> HamiltonianSystem::junction_positions() const {
    std::vector<Index> out;
    for (size_t i = 0; i < coordinates.size(); ++i)
        if (coordinates[i].role == CoordinateRole::Junction) out.push_back(static_cast<Index>(i));
    return out;
}

std::vector<Index> HamiltonianSystem::display_order() const {
    const Index n = layout.n;
    std::vector<Index> charges, fluxes, junctions;
    for (Index i = 0; i < n; ++i) {
        const auto& c = coordinates[static_cast<size_t>(i)];
        if (c.role == CoordinateRole::Junction) junctions.push_back(i);
        else if (c.kind == CoordinateKind::Charge) charges.push_back(i);
        else fluxes.push_back(i);
    }
    std::vector<Index> out;
    for (Index i : charges) out.push_back(i);
    for (Index i : fluxes) out.push_back(i);
    for (Index i : charges) out.push_back(i + n);
    for (Index i : fluxes) out.push_back(i + n);
    for (Index i : junctions) out.push_back(i);
    for (Index i : junctions) out.push_back(i + n);
    return out;
}

RealMatrix HamiltonianSystem::total_transform() const {
    RealMatrix t = RealMatrix::Identity(h.rows(), h.cols());
    for (const auto& step : provenance) t = t * step.matrix;
    return t;
}

Netlist eliminate_transformers(const Netlist& netlist) {
    if (netlist.transformers.empty()) return netlist;
    const NameIndex caps = index_by_name(netlist.capacitors);
    const NameIndex inds = index_by_name(netlist.inductors);
    const Index nc = static_cast<Index>(netlist.capacitors.size());
    const Index ml = static_cast<Index>(netlist.inductors.size());

    RealMatrix d = RealMatrix::Zero(ml, nc);
    for (Index i = 0; i < ml; ++i)
        for (const auto& inc : netlist.inductors[static_cast<size_t>(i)].incidences)
            d(i, lookup(caps, inc.target)) += inc.coefficient;

    for (const auto& tr : netlist.transformers) {
        const Index k = static_cast<Index>(tr.left.size());
        const Index r = static_cast<Index>(tr.right.size());
        RealMatrix left = RealMatrix::Zero(k, nc);
        RealMatrix right = RealMatrix::Zero(ml, r);
        RealMatrix turns(k, r);
        for (Index p = 0; p < k; ++p)
            for (const auto& inc : tr.left[static_cast<size_t>(p)]) left(p, lookup(caps, inc.target)) += inc.coefficient;
        for (Index q = 0; q < r; ++q)
            for (const auto& inc : tr.right[static_cast<size_t>(q)])
                right(lookup(inds, inc.target), q) += inc.coefficient;
        if (static_cast<Index>(tr.turns.size()) != k)
            throw Error(ErrorCode::InvalidNetlist, "transformer '" + tr.name + "' turns rows must match left ports");
        for (Index p = 0; p < k; ++p) {
            const auto& row = tr.turns[static_cast<size_t>(p)];
            if (static_cast<Index>(row.size()) != r)
                throw Error(ErrorCode::InvalidNetlist,
                            "transformer '" + tr.name + "' turns columns must match right ports");
            for (Index q = 0; q < r; ++q) turns(p, q) = row[static_cast<size_t>(q)];
        }
        d += right * turns.transpose() * left;
    }

    Netlist out = netlist;
    out.transformers.clear();
    for (Index i = 0; i < ml; ++i) {
        auto& inductor = out.inductors[static_cast<size_t>(i)];
        inductor.incidences.clear();
        for (Index c = 0; c < nc; ++c)
            if (d(i, c) != 0.0)
                inductor.incidences.push_back({netlist.capacitors[static_cast<size_t>(c)].name, d(i, c), inductor.loc});
    }
    return out;
}

CircuitSystem assemble_lagrangian(const Netlist& netlist) {
    if (!netlist.transformers.empty())
        throw Error(ErrorCode::InvalidNetlist, "transformers must be eliminated before assembly");
    require_buildable(netlist);

    const NameIndex caps = index_by_name(netlist.capacitors);
    const NameIndex inds = index_by_name(netlist.inductors);
    const Index nc = static_cast<Index>(netlist.capacitors.size());
    const Index ml = static_cast<Index>(netlist.inductors.size());

    CircuitSystem cs;
    cs.c = RealMatrix::Zero(nc, nc);
    cs.l = RealMatrix::Zero(ml, ml);
    cs.d = RealMatrix::Zero(ml, nc);
    cs.z = RealMatrix::Zero(ml, ml);
    for (Index c = 0; c < nc; ++c) cs.c(c, c) = netlist.capacitors[static_cast<size_t>(c)].value;
    for (Index i = 0; i < ml; ++i) {
        const auto& inductor = netlist.inductors[static_cast<size_t>(i)];
        cs.l(i, i) = inductor.value;
        for (const auto& inc : inductor.incidences) cs.d(i, lookup(caps, inc.target)) += inc.coefficient;
    }
    for (const auto& g : netlist.gyrators) {
        const Index a = lookup(inds, g.ports[0].target);
        const Index b = lookup(inds, g.ports[1].target);
        cs.z(a, b) -= g.r;
        cs.z(b, a) += g.r;
    }
    for (const auto& circ : netlist.circulators) {
        // Lowered through Z = -R (1 - S)^-1 (1 + S); S = J_2 on two ports would give the gyrator block.
        const Eigen::Matrix3d s = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(circ.s->data());
        const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
        const Eigen::Matrix3d zfull = -circ.r * (id - s).inverse() * (id + s);
        const Eigen::Matrix3d anti = 0.5 * (zfull - zfull.transpose());
        Index ports[3];
        for (int p = 0; p < 3; ++p) ports[p] = lookup(inds, circ.ports[static_cast<size_t>(p)].target);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) cs.z(ports[a], ports[b]) += anti(a, b);
    }

    cs.registry.resize(static_cast<size_t>(ml + nc));
    for (Index i = 0; i < ml; ++i) {
        const auto& inductor = netlist.inductors[static_cast<size_t>(i)];
        cs.registry[static_cast<size_t>(i)] = {"Q_" + inductor.name, inductor.name, CoordinateKind::Charge,
                                               CoordinateRole::Internal, false, inductor.value};
    }
    for (Index c = 0; c < nc; ++c) {
        const auto& cap = netlist.capacitors[static_cast<size_t>(c)];
        cs.registry[static_cast<size_t>(ml + c)] = {"Phi_" + cap.name, cap.name, CoordinateKind::Flux,
                                                    CoordinateRole::Internal, false, cap.value};
    }
    for (const auto& j : netlist.josephson) {
        const Index pos = ml + lookup(caps, j.anchor->target);
        cs.nonlinear.push_back({NonlinearKind::Josephson, j.name, pos, j.energy, j.island});
    }
    for (const auto& j : netlist.phase_slips) {
        const Index pos = lookup(inds, j.anchor->target);
        cs.nonlinear.push_back({NonlinearKind::PhaseSlip, j.name, pos, j.energy, j.island});
    }
    for (const auto& term : cs.nonlinear) {
        auto& coord = cs.registry[static_cast<size_t>(term.coordinate)];
        coord.role = CoordinateRole::Junction;
        coord.compact = coord.compact || term.compact;
    }

    // Coupling: shares an inductor row (D or Z) with a junction coordinate.
    std::vector<bool> touches_junction(static_cast<size_t>(ml), false);
    for (Index i = 0; i < ml; ++i) {
        bool touched = cs.registry[static_cast<size_t>(i)].role == CoordinateRole::Junction;
        for (Index c = 0; c < nc; ++c)
            touched = touched || (cs.d(i, c) != 0.0 && cs.registry[static_cast<size_t>(ml + c)].role ==
                                                           CoordinateRole::Junction);
        for (Index k = 0; k < ml; ++k)
            touched = touched || (cs.z(i, k) != 0.0 && cs.registry[static_cast<size_t>(k)].role ==
                                                           CoordinateRole::Junction);
        touches_junction[static_cast<size_t>(i)] = touched;
    }
    for (Index i = 0; i < ml; ++i) {
        auto& coord = cs.registry[static_cast<size_t>(i)];
        if (coord.role == CoordinateRole::Internal && touches_junction[static_cast<size_t>(i)])
            coord.role = CoordinateRole::Coupling;
    }
    for (Index c = 0; c < nc; ++c) {
        auto& coord = cs.registry[static_cast<size_t>(ml + c)];
        if (coord.role != CoordinateRole::Internal) continue;
        for (Index i = 0; i < ml; ++i)
            if (cs.d(i, c) != 0.0 && touches_junction[static_cast<size_t>(i)]) coord.role = CoordinateRole::Coupling;
    }
    return cs;
}

CircuitSystem build_circuit(const Netlist& netlist) {
    require_buildable(netlist);
    return assemble_lagrangian(eliminate_transformers(netlist));
}

HamiltonianSystem legendre(const CircuitSystem& cs) {
    const Index ml = cs.charges();
    const Index nc = cs.fluxes();
    const Index n = ml + nc;

    RealMatrix a = RealMatrix::Zero(ml, 2 * n);
    a.block(0, 0, ml, ml) = -0.5 * cs.z;
    a.block(0, ml, ml, nc) = cs.d;
    a.block(0, n, ml, ml) = RealMatrix::Identity(ml, ml);
    RealMatrix b = RealMatrix::Zero(nc, 2 * n);
    b.block(0, n + ml, nc, nc) = RealMatrix::Identity(nc, nc);

    HamiltonianSystem hs;
    hs.h = a.transpose() * cs.l.diagonal().cwiseInverse().asDiagonal() * a +
           b.transpose() * cs.c.diagonal().cwiseInverse().asDiagonal() * b;
    hs.h = 0.5 * (hs.h + hs.h.transpose()).eval();
    hs.layout = cs.layout();
    hs.coordinates = cs.registry;
    for (const auto& term : cs.nonlinear) {
        CosineTerm cos_term;
        cos_term.kind = term.kind;
        cos_term.name = term.name;
        cos_term.energy = term.energy;
        cos_term.coordinate = term.coordinate;
        cos_term.compact = term.compact;
        cos_term.covector = RealVector::Zero(2 * n);
        // Flux quantum and charge unit are 1: phi = 2 pi Phi, and the phase-slip argument is pi Q / 2.
        cos_term.covector(term.coordinate) =
            term.kind == NonlinearKind::Josephson ? 2.0 * std::numbers::pi : 0.5 * std::numbers::pi;
        hs.potential.push_back(std::move(cos_term));
    }
    for (Index i = 0; i < ml; ++i) {
        for (Index k = i + 1; k < ml; ++k) {
            if (cs.z(i, k) != 0.0) {
                hs.charge_scale = std::abs(cs.z(i, k));
                i = ml;
                break;
            }
        }
    }
    if (ml > 0) hs.reference_inductance = cs.l(0, 0);
    return hs;
}

HamiltonianSystem apply_transform(const HamiltonianSystem& hs, const RealMatrix& t, const std::string& label,
                                  const Tolerance& tol) {
    if (t.rows() != hs.h.rows() || t.cols() != hs.h.cols())
        throw Error(ErrorCode::InvalidArgument, "transform dimension does not match the Hamiltonian");
    const RealMatrix j = canonical_j(hs.layout.n);
    const double residual = (t.transpose() * j * t - j).norm();
    const double bound = tol.verify_abs * std::max(1.0, t.squaredNorm());
    if (residual > bound) throw VerificationFailure(label + ": T^T J T = J", residual, bound);

    HamiltonianSystem out = hs;
    out.h = t.transpose() * hs.h * t;
    out.h = 0.5 * (out.h + out.h.transpose()).eval();
    for (auto& term : out.potential) term.covector = t.transpose() * term.covector;
    out.provenance.push_back({label, t});
    return out;
}

HamiltonianSystem charge_shift(const HamiltonianSystem& hs, const Tolerance& tol) {
    const Index n = hs.layout.n;
    std::vector<Index> charges, junction_fluxes;
    for (Index i = 0; i < n; ++i) {
        const auto& c = hs.coordinates[static_cast<size_t>(i)];
        if (c.kind == CoordinateKind::Charge) charges.push_back(i);
    }
    for (const auto& term : hs.potential)
        if (term.kind == NonlinearKind::Josephson) junction_fluxes.push_back(term.coordinate);
    std::sort(junction_fluxes.begin(), junction_fluxes.end());
    junction_fluxes.erase(std::unique(junction_fluxes.begin(), junction_fluxes.end()), junction_fluxes.end());

    RealMatrix t = RealMatrix::Identity(2 * n, 2 * n);
    if (!junction_fluxes.empty()) {
        const Index nq = static_cast<Index>(charges.size());
        const Index nj = static_cast<Index>(junction_fluxes.size());
        RealMatrix hq(2 * n, nq), hj(2 * n, nj);
        for (Index k = 0; k < nq; ++k) hq.col(k) = hs.h.col(charges[static_cast<size_t>(k)]);
        for (Index k = 0; k < nj; ++k) hj.col(k) = hs.h.col(junction_fluxes[static_cast<size_t>(k)]);
        RealMatrix shift = RealMatrix::Zero(nq, nj);
        if (nq > 0) shift = -pseudo_inverse(hq, tol) * hj;
        const double residual = (hj + hq * shift).norm();
        const double bound = tol.verify_abs * frobenius_bound(hs.h) * std::max(1.0, shift.norm());
        if (residual > bound)
            throw Error(ErrorCode::SingularZ,
                        "junction fluxes cannot be shifted out of the quadratic part (Z is singular on the "
                        "coupled block)");
        for (Index a = 0; a < nq; ++a) {
            for (Index b = 0; b < nj; ++b) {
                const Index qa = charges[static_cast<size_t>(a)];
                const Index fb = junction_fluxes[static_cast<size_t>(b)];
                t(qa, fb) = shift(a, b);
                t(n + fb, n + qa) = -shift(a, b);
            }
        }
    }
    HamiltonianSystem out = apply_transform(hs, t, "charge_shift", tol);
    for (Index f : junction_fluxes) {
        out.h.row(f).setZero();
        out.h.col(f).setZero();
    }
    return out;
}

RealMatrix rescale_matrix(const HamiltonianSystem& hs, const RescaleSpec& spec) {
    const double r = spec.charge_scale.value_or(hs.charge_scale);
    const double l_ref = spec.reference_inductance.value_or(hs.reference_inductance);
    if (!(r > 0.0) || !(l_ref > 0.0))
        throw Error(ErrorCode::InvalidArgument, "rescaling needs a positive resistance and inductance");
    const Index n = hs.layout.n;
    RealVector scale(2 * n);
    for (Index i = 0; i < n; ++i) {
        const auto& c = hs.coordinates[static_cast<size_t>(i)];
        double s = 1.0; // new coordinate = s * old coordinate
        if (c.kind == CoordinateKind::Charge) s = std::sqrt(r);
        else if (c.value > 0.0) s = std::pow(c.value, 0.25) * std::pow(l_ref, -0.25);
        scale(i) = 1.0 / s;
        scale(n + i) = s;
    }
    return scale.asDiagonal();
}

HamiltonianSystem rescale(const HamiltonianSystem& hs, const RescaleSpec& spec) {
    return apply_transform(hs, rescale_matrix(hs, spec), "rescale");
}

} // namespace symq
