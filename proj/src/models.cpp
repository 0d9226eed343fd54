#include "symq/models.hpp"

#include "symq/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace symq {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, message);
}

} // namespace

void LandauParams::validate() const {
    require(std::isfinite(m) && m > 0.0, "landau: m must be positive");
    require(std::isfinite(k) && k >= 0.0, "landau: k must be non-negative");
    require(std::isfinite(b) && b >= 0.0, "landau: b must be non-negative");
}

double LandauParams::chi() const {
    require(b > 0.0, "landau: the rescaled form needs b > 0");
    return std::sqrt(k / m) / cyclotron();
}

RealMatrix landau_z(const LandauParams& p) {
    p.validate();
    RealMatrix h = RealMatrix::Zero(4, 4);
    h(0, 0) = h(1, 1) = p.k;
    h(0, 1) = h(1, 0) = -p.k;
    h(2, 2) = h(3, 3) = 1.0 / p.m;
    return h;
}

RealMatrix landau_xy_physical(const LandauParams& p) {
    p.validate();
    const double g = p.coupling();
    const double kt = p.k + g * g / p.m;
    RealMatrix h = RealMatrix::Zero(8, 8);
    for (int block = 0; block < 2; ++block) {
        const int o = 2 * block;
        h(o, o) = h(o + 1, o + 1) = kt;
        h(o, o + 1) = h(o + 1, o) = -p.k;
    }
    for (int i = 4; i < 8; ++i) h(i, i) = 1.0 / p.m;
    // x couples to p_y with -g/m, y couples to p_x with +g/m.
    for (int i = 0; i < 2; ++i) {
        h(i, 6 + i) = h(6 + i, i) = -g / p.m;
        h(2 + i, 4 + i) = h(4 + i, 2 + i) = g / p.m;
    }
    return h;
}

RealMatrix landau_xy_rescaled(double chi, double omega_c) {
    require(std::isfinite(chi) && chi >= 0.0, "landau: chi must be non-negative");
    require(std::isfinite(omega_c) && omega_c > 0.0, "landau: omega_c must be positive");
    const double c2 = chi * chi;
    RealMatrix h = RealMatrix::Zero(8, 8);
    for (int block = 0; block < 2; ++block) {
        const int o = 2 * block;
        h(o, o) = h(o + 1, o + 1) = c2 + 0.25;
        h(o, o + 1) = h(o + 1, o) = -c2;
    }
    for (int i = 4; i < 8; ++i) h(i, i) = 1.0;
    for (int i = 0; i < 2; ++i) {
        h(i, 6 + i) = h(6 + i, i) = -0.5;
        h(2 + i, 4 + i) = h(4 + i, 2 + i) = 0.5;
    }
    return omega_c * h;
}

RealMatrix landau_xy(const LandauParams& p) {
    p.validate();
    return landau_xy_rescaled(p.chi(), p.cyclotron());
}

RealMatrix landau_xy_rescaling(const LandauParams& p) {
    p.validate();
    const double scale = std::sqrt(p.m * p.cyclotron());
    require(scale > 0.0, "landau: the rescaling needs b > 0");
    RealVector d(8);
    d.head(4).setConstant(1.0 / scale);
    d.tail(4).setConstant(scale);
    return d.asDiagonal();
}

RealMatrix landau_full(const LandauParams& p) {
    const RealMatrix hz = landau_z(p);
    const RealMatrix hxy = landau_xy_physical(p);
    // Combined positions (z1, z2, x1, x2, y1, y2), momenta in the same order.
    const std::array<Index, 4> z_map{0, 1, 6, 7};
    const std::array<Index, 8> xy_map{2, 3, 4, 5, 8, 9, 10, 11};
    RealMatrix h = RealMatrix::Zero(12, 12);
    for (Index a = 0; a < 4; ++a)
        for (Index b = 0; b < 4; ++b) h(z_map[static_cast<size_t>(a)], z_map[static_cast<size_t>(b)]) = hz(a, b);
    for (Index a = 0; a < 8; ++a)
        for (Index b = 0; b < 8; ++b)
            h(xy_map[static_cast<size_t>(a)], xy_map[static_cast<size_t>(b)]) = hxy(a, b);
    return h;
}

Netlist lcc_netlist(double c1, double c2, double l) {
    require(c1 > 0.0 && c2 > 0.0 && l > 0.0, "lcc: element values must be positive");
    std::ostringstream os;
    os << "C c1 " << format_number(c1) << "\nC c2 " << format_number(c2) << "\nL l1 " << format_number(l)
       << " c1:+ c2:+\n";
    return parse_netlist(os.str());
}

CircuitSystem lcc_circuit(double c1, double c2, double l) { return build_circuit(lcc_netlist(c1, c2, l)); }

void BlackBoxParams::validate() const {
    for (double v : {omega, omega_c, omega_j, r})
        require(std::isfinite(v) && v > 0.0, "blackbox: frequencies and resistance must be positive");
    for (double n : turns) require(std::isfinite(n), "blackbox: turns ratios must be finite");
    require(std::isfinite(lj_ratio) && lj_ratio >= 0.0, "blackbox: lj_ratio must be non-negative");
    if (ej) require(std::isfinite(*ej) && *ej >= 0.0, "blackbox: junction energy must be non-negative");
}

double BlackBoxParams::junction_energy() const {
    // Second-order term of -E cos(2 pi Phi) is 2 pi^2 E Phi^2 = Phi^2 / (2 L_J).
    return ej.value_or(lj_ratio / (4.0 * std::numbers::pi * std::numbers::pi * inductance()));
}

Netlist blackbox_netlist(const BlackBoxParams& p) {
    p.validate();
    const double l = p.inductance();
    const double cc = 1.0 / (p.omega_c * p.omega_c * l);
    const double cj = 1.0 / (p.omega_j * p.omega_j * l);
    const auto& n = p.turns;
    std::ostringstream os;
    os << "C cca " << format_number(cc) << "\nC ccb " << format_number(cc) << "\nC cJa " << format_number(cj)
       << "\nC cJb " << format_number(cj) << "\nL l1 " << format_number(l) << "\nL l2 " << format_number(l)
       << "\nGYR g1 " << format_number(p.r) << " l1 l2\n"
       << "TR t1 left=cJa:+,cca:+;cJb:+,ccb:+ right=l1:-;l2:-;l1:-;l2:- turns=" << format_number(n[0]) << ','
       << format_number(n[1]) << ",0,0;0,0," << format_number(n[2]) << ',' << format_number(n[3]) << '\n';
    if (p.junctions) {
        const std::string island = p.island ? "" : " island=false";
        const std::string ej = format_number(p.junction_energy());
        os << "JJ ja " << ej << " cJa" << island << "\nJJ jb " << ej << " cJb" << island << '\n';
    }
    return parse_netlist(os.str());
}

CircuitSystem blackbox_circuit(const BlackBoxParams& p) { return build_circuit(blackbox_netlist(p)); }

HamiltonianSystem blackbox_hamiltonian(const BlackBoxParams& p, const Tolerance& tol) {
    return rescale(charge_shift(legendre(blackbox_circuit(p)), tol));
}

} // namespace symq
