#pragma once

#include "symq/circuit.hpp"
#include "symq/linalg.hpp"
#include "symq/netlist.hpp"

#include <array>
#include <optional>

namespace symq {

// Two identical charged particles (unit charge) coupled by a spring, in a field along z.
struct LandauParams {
    double m = 1.0; // mass
    double k = 1.0; // spring constant
    double b = 1.0; // field magnitude

    void validate() const;
    double coupling() const { return 0.5 * b; }       // vector-potential strength, eB/2
    double cyclotron() const { return b / m; }        // eB/m
    double chi() const;                               // sqrt(k/m) / cyclotron
};

// (z1, z2, pz1, pz2).
RealMatrix landau_z(const LandauParams& p);

// (x1, x2, y1, y2, px1, px2, py1, py2) in physical units.
RealMatrix landau_xy_physical(const LandauParams& p);

// Dimensionless form in units of the cyclotron frequency, scaled by omega_c.
RealMatrix landau_xy_rescaled(double chi, double omega_c = 1.0);

// Rescaled form for the given parameters (needs b > 0).
RealMatrix landau_xy(const LandauParams& p);

// Symplectic T with T^T physical T = rescaled.
RealMatrix landau_xy_rescaling(const LandauParams& p);

// Both sectors: positions (z1, z2, x1, x2, y1, y2) then their momenta.
RealMatrix landau_full(const LandauParams& p);

// Inductor in series with two capacitors.
Netlist lcc_netlist(double c1, double c2, double l);
CircuitSystem lcc_circuit(double c1, double c2, double l);

// Two-port nonreciprocal admittance (one gyrator stage behind a Belevitch transformer),
// capacitively coupled to two Josephson junctions.
struct BlackBoxParams {
    double omega = 1.0;   // R / L
    double omega_c = 1.0; // 1 / sqrt(C_c L)
    double omega_j = 1.0; // 1 / sqrt(C_J L)
    double r = 1.0;       // gyration resistance
    std::array<double, 4> turns{1.0, 1.0, 0.0, 1.0}; // n11, n12, n21, n22
    std::optional<double> ej; // junction energy; default from lj_ratio
    double lj_ratio = 1.0;    // L / L_J used when ej is not given
    bool island = true;
    bool junctions = true;

    void validate() const;
    double inductance() const { return r / omega; }
    double junction_energy() const;
};

Netlist blackbox_netlist(const BlackBoxParams& p);
CircuitSystem blackbox_circuit(const BlackBoxParams& p);
// legendre, charge_shift, rescale.
HamiltonianSystem blackbox_hamiltonian(const BlackBoxParams& p, const Tolerance& tol = {});

} // namespace symq
