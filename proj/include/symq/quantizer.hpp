#pragma once

#include "symq/circuit.hpp"
#include "symq/linalg.hpp"
#include "symq/williamson.hpp"

#include <string>
#include <vector>

namespace symq {

enum class QuantizationRoute { TwoTier, BlackBox };

// Coefficient numerator/denominator of E * phi^order in the expansion of -E cos(phi).
struct TaylorTerm {
    int order = 0;
    long long numerator = 0;
    long long denominator = 1;

    double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

struct JunctionTerm {
    std::string name;
    NonlinearKind kind = NonlinearKind::Josephson;
    double energy = 0.0;
    RealVector covector;           // phase = covector . z in the model's coordinates
    bool full_cosine = true;       // two-tier keeps the cosine whole
    std::vector<TaylorTerm> tail;  // black-box residual from order 4
};

// Coordinate counts of a partially diagonalized Hamiltonian. Positions are ordered
// (nondynamical, free, harmonic, junction) and momenta likewise.
struct PartialLayout {
    Index n_nd = 0, n_f = 0, n_ho = 0, n_j = 0;

    Index n() const { return n_nd + n_f + n_ho + n_j; }
    Index ho_position(Index k) const { return n_nd + n_f + k; }
    Index ho_momentum(Index k) const { return n() + ho_position(k); }
    Index junction_position(Index k) const { return n_nd + n_f + n_ho + k; }
    Index junction_momentum(Index k) const { return n() + junction_position(k); }
};

struct QuantizedModel {
    QuantizationRoute route = QuantizationRoute::TwoTier;
    RealVector mode_freqs;  // descending
    RealMatrix coupling_g;  // G: modes x junctions (oscillator positions to junction momenta)
    RealMatrix coupling_m;  // M: modes x junctions (oscillator momenta to junction momenta)
    ComplexMatrix couplings; // g = (G - i M) / sqrt(2)
    std::vector<JunctionTerm> junction_terms;
    RealMatrix mode_expressions;     // junctions x 2n: junction phase in normal coordinates
    std::vector<bool> nd_dependency; // per junction
    std::vector<std::string> warnings;

    NormalForm normal_form; // of the diagonalized block
    RealMatrix transform;   // x = transform * z
    RealMatrix quadratic;   // quadratic part in the z coordinates
    PartialLayout partial;  // two-tier only
    bool nd_coupling = false; // two-tier: junctions couple to the nondynamical sector
};

struct QuantizeOptions {
    Tolerance tol;
    bool transmon_override = false; // allow linearizing compact junction phases
    bool symplectic_w = false;
};

// Diagonalizes the sector without junction pairs and keeps the cosines whole.
// Needs the junction fluxes out of the quadratic part (see charge_shift).
QuantizedModel two_tier(const HamiltonianSystem& hs, const QuantizeOptions& options = {});

// Linearizes every cosine, diagonalizes everything, and keeps the Taylor tail from order 4.
QuantizedModel blackbox(const HamiltonianSystem& hs, const QuantizeOptions& options = {});

struct CrossValidation {
    RealVector two_tier_freqs; // after linearizing the two-tier cosines
    RealVector blackbox_freqs;
    RealVector deltas;
    double max_delta = 0.0;
};

// Compares the linearized two-tier spectrum with the black-box one.
// Throws MismatchBeyondTolerance when a frequency differs by more than tolerance.
CrossValidation cross_validate(const QuantizedModel& two_tier_model, const QuantizedModel& blackbox_model,
                               double tolerance = 1e-6, const Tolerance& tol = {});

// Quadratic form in (oscillator positions, junction fluxes, oscillator momenta, junction momenta)
// rebuilt from frequencies, G, M and the junction block; optionally with linearized cosines.
RealMatrix reconstruct_quadratic(const QuantizedModel& two_tier_model, bool linearize);

// Orders 4..max_order of -cos(phi), i.e. (-1)^(m+1) / (2m)!.
std::vector<TaylorTerm> cosine_tail(int max_order = 12);

} // namespace symq
