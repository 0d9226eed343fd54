#pragma once

#include "symq/linalg.hpp"
#include "symq/netlist.hpp"
#include "symq/williamson.hpp"

#include <optional>
#include <string>
#include <vector>

namespace symq {

enum class CoordinateKind { Charge, Flux };

// Junction: carries a cosine term. Coupling: linked to a junction through D or Z.
enum class CoordinateRole { Internal, Coupling, Junction };

// One configuration coordinate; its conjugate momentum shares the index.
struct Coordinate {
    std::string label;
    std::string element; // inductor or capacitor name
    CoordinateKind kind = CoordinateKind::Flux;
    CoordinateRole role = CoordinateRole::Internal;
    bool compact = false;
    double value = 0.0; // inductance (charges) or capacitance (fluxes)
};

enum class NonlinearKind { Josephson, PhaseSlip };

struct NonlinearTerm {
    NonlinearKind kind = NonlinearKind::Josephson;
    std::string name;
    Index coordinate = 0; // position index in the registry
    double energy = 0.0;
    bool compact = true;
};

// Matrices of the doubled-coordinate Lagrangian. Positions are (Q, Phi):
// inductor loop charges then capacitor branch fluxes, both in declaration order.
struct CircuitSystem {
    RealMatrix c; // N_C x N_C, diagonal
    RealMatrix l; // M_L x M_L, diagonal
    RealMatrix d; // M_L x N_C
    RealMatrix z; // M_L x M_L, antisymmetric
    std::vector<Coordinate> registry;
    std::vector<NonlinearTerm> nonlinear;

    Index charges() const { return l.rows(); }
    Index fluxes() const { return c.rows(); }
    Index n() const { return charges() + fluxes(); }
    PhaseSpaceLayout layout() const;
};

// U = -energy * cos(covector . x) in the current phase-space coordinates.
struct CosineTerm {
    NonlinearKind kind = NonlinearKind::Josephson;
    std::string name;
    double energy = 0.0;
    RealVector covector;
    Index coordinate = 0; // the junction's own position index
    bool compact = true;
};

// A recorded canonical change of variables, x_before = matrix * x_after.
struct Transform {
    std::string label;
    RealMatrix matrix;
};

// H = 1/2 x^T h x + sum of cosine terms.
struct HamiltonianSystem {
    RealMatrix h;
    PhaseSpaceLayout layout;
    std::vector<Coordinate> coordinates; // one per position
    std::vector<CosineTerm> potential;
    std::vector<Transform> provenance;
    double charge_scale = 1.0;         // default rescaling resistance
    double reference_inductance = 1.0; // default rescaling inductance

    // Positions (charges, then non-junction fluxes), their momenta, then junction pairs.
    std::vector<Index> display_order() const;
    std::vector<Index> junction_positions() const;
    // Product of all recorded transforms (identity if none).
    RealMatrix total_transform() const;
};

// Folds every transformer into inductor incidences: D += D_R N^T D_L.
Netlist eliminate_transformers(const Netlist& netlist);

// Requires a transformer-free netlist without validation errors.
CircuitSystem assemble_lagrangian(const Netlist& netlist);

// validate, eliminate_transformers, assemble_lagrangian.
CircuitSystem build_circuit(const Netlist& netlist);

// h = A^T L^-1 A + B^T C^-1 B with A x = P - Z Q / 2 + D Phi and B x = Pi.
HamiltonianSystem legendre(const CircuitSystem& circuit);

// Applies x_before = t * x_after after checking that t is symplectic.
HamiltonianSystem apply_transform(const HamiltonianSystem& hs, const RealMatrix& t, const std::string& label,
                                  const Tolerance& tol = {});

// Shifts loop charges by junction fluxes so that junction fluxes leave the quadratic part.
HamiltonianSystem charge_shift(const HamiltonianSystem& hs, const Tolerance& tol = {});

struct RescaleSpec {
    std::optional<double> charge_scale;         // R
    std::optional<double> reference_inductance; // L
};

// Q -> sqrt(R) Q, P -> P / sqrt(R), Phi -> C^(1/4) L^(-1/4) Phi, Pi -> C^(-1/4) L^(1/4) Pi.
HamiltonianSystem rescale(const HamiltonianSystem& hs, const RescaleSpec& spec = {});
RealMatrix rescale_matrix(const HamiltonianSystem& hs, const RescaleSpec& spec = {});

} // namespace symq
