#pragma once

#include "symq/linalg.hpp"

#include <string>
#include <vector>

namespace symq {

// Phase-space coordinates ordered as all positions, then all momenta.
struct PhaseSpaceLayout {
    Index n = 0;                     // degrees of freedom
    std::vector<std::string> labels; // 2n labels, may be empty

    Index dim() const { return 2 * n; }
};

struct DofClassification {
    Index n_nd = 0; // nondynamical conjugate pairs
    Index n_f = 0;  // free particles
    Index n_ho = 0; // harmonic oscillators
    RealMatrix k1_basis; // orthonormal basis of ker(JH)
    RealMatrix k2_basis; // orthonormal basis of ker((JH)^2)
};

struct SymplecticPairs {
    RealMatrix e; // columns e_1..e_k
    RealMatrix f; // columns f_1..f_k
};

struct HarmonicPairs {
    RealMatrix e;
    RealMatrix f;
    RealVector omega; // one frequency per pair, descending
};

struct NormalFormOptions {
    bool symplectic_w = false; // orthonormalize the nondynamical block as well
};

struct Residuals {
    double h = 0.0; // ||S^T H S - H_D||_F
    double j = 0.0; // ||S^T J S - K||_F against the expected block form
};

struct NormalForm {
    RealMatrix s;       // columns [W | E | F | Eps | Fps]
    RealMatrix s_inv;
    RealMatrix h_diag;  // S^T H S as computed
    RealVector omega;   // harmonic frequencies, descending
    DofClassification classification;
    RealMatrix w_block; // W^T J W
    Residuals residuals;

    Index n() const { return s.rows() / 2; }
    Index w_offset() const { return 0; }
    Index e_offset() const { return 2 * classification.n_nd; }
    Index f_offset() const { return e_offset() + classification.n_f; }
    Index eps_offset() const { return f_offset() + classification.n_f; }
    Index fps_offset() const { return eps_offset() + classification.n_ho; }

    // Ideal block pattern of S^T H S.
    RealMatrix expected_h_diag() const;
    // Ideal block pattern of S^T J S (W block taken from w_block).
    RealMatrix expected_j_form() const;
    // Generator of the dynamics in normal coordinates, y' = D y.
    RealMatrix generator() const;
};

RealMatrix canonical_j(Index n);
inline RealMatrix canonical_j(const PhaseSpaceLayout& layout) { return canonical_j(layout.n); }

// Throws NotSquare or OddDimension on malformed input.
bool check_psd(const RealMatrix& h, const Tolerance& tol = {});

DofClassification classify_dof(const RealMatrix& h, const Tolerance& tol = {});

SymplecticPairs free_particle_pairs(const RealMatrix& h, const RealMatrix& j,
                                    const DofClassification& cls, const Tolerance& tol = {});

RealMatrix nondynamical_block(const RealMatrix& h, const RealMatrix& j,
                              const DofClassification& cls, const SymplecticPairs& free,
                              const Tolerance& tol = {});

HarmonicPairs harmonic_pairs(const RealMatrix& h, const RealMatrix& j, const Tolerance& tol = {});

NormalForm normal_form(const RealMatrix& h, const Tolerance& tol = {},
                       const NormalFormOptions& options = {});

// Symplectic Gram-Schmidt on a nondynamical basis; returns [q_1..q_k | p_1..p_k].
RealMatrix symplectify(const RealMatrix& w, const RealMatrix& j);

// <x, J y>
inline double symplectic_product(const RealVector& x, const RealMatrix& j, const RealVector& y) {
    return x.dot(j * y);
}

} // namespace symq
