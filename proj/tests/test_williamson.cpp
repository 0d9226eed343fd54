#include "symq/error.hpp"
#include "symq/williamson.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace symq;

namespace {

RealMatrix diag(std::initializer_list<double> v) {
    RealVector d(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) d(i++) = x;
    return d.asDiagonal();
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

void expect_valid(const RealMatrix& h, const NormalForm& nf) {
    const RealMatrix j = canonical_j(h.rows() / 2);
    EXPECT_LE((nf.s.transpose() * h * nf.s - nf.expected_h_diag()).norm(), 1e-8 * (1 + h.norm()));
    EXPECT_LE((nf.s.transpose() * j * nf.s - nf.expected_j_form()).norm(), 1e-8);
    EXPECT_LE((nf.s_inv * nf.s - RealMatrix::Identity(h.rows(), h.rows())).norm(), 1e-8);
    EXPECT_LE((nf.s_inv * j * h * nf.s - nf.generator()).norm(), 1e-7 * (1 + h.norm()));
}

} // namespace

TEST(CanonicalJ, SmallCases) {
    RealMatrix j1(2, 2);
    j1 << 0, 1, -1, 0;
    EXPECT_EQ(canonical_j(1), j1);
    const RealMatrix j2 = canonical_j(2);
    EXPECT_EQ(j2.topRightCorner(2, 2), RealMatrix::Identity(2, 2));
    EXPECT_EQ(j2.bottomLeftCorner(2, 2), -RealMatrix::Identity(2, 2));
    for (Index n = 1; n <= 6; ++n) {
        const RealMatrix j = canonical_j(n);
        EXPECT_EQ(j * j, -RealMatrix::Identity(2 * n, 2 * n));
    }
    PhaseSpaceLayout layout{3, {}};
    EXPECT_EQ(canonical_j(layout).rows(), 6);
}

TEST(CheckPsd, Basics) {
    EXPECT_TRUE(check_psd(diag({1, 1})));
    EXPECT_FALSE(check_psd(diag({1, -1})));
    EXPECT_TRUE(check_psd(RealMatrix::Zero(4, 4)));
    RealMatrix asym = diag({1, 1});
    asym(0, 1) = 0.5;
    EXPECT_FALSE(check_psd(asym));
    EXPECT_EQ(code_of([] { check_psd(RealMatrix::Zero(2, 3)); }), ErrorCode::NotSquare);
    EXPECT_EQ(code_of([] { check_psd(RealMatrix::Zero(3, 3)); }), ErrorCode::OddDimension);
}

TEST(ClassifyDof, TrivialCases) {
    auto c0 = classify_dof(RealMatrix::Zero(2, 2));
    EXPECT_EQ(c0.n_nd, 1);
    EXPECT_EQ(c0.n_f, 0);
    EXPECT_EQ(c0.n_ho, 0);
    auto c1 = classify_dof(diag({0, 1}));
    EXPECT_EQ(c1.n_nd, 0);
    EXPECT_EQ(c1.n_f, 1);
    EXPECT_EQ(c1.n_ho, 0);
    EXPECT_EQ(c1.k1_basis.cols(), 1);
    EXPECT_EQ(c1.k2_basis.cols(), 2);
    auto c2 = classify_dof(diag({2, 3}));
    EXPECT_EQ(c2.n_ho, 1);
    EXPECT_EQ(code_of([] { classify_dof(diag({1, -1})); }), ErrorCode::NotPSD);
}

TEST(ClassifyDof, KernelInclusionAndParity) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const auto s = fixtures::structured_psd(trial % 3, (trial / 3) % 3, {1.0 + trial % 4, 0.5}, rng, 0.3);
        const auto c = classify_dof(s.h);
        EXPECT_EQ(c.n_nd, s.n_nd);
        EXPECT_EQ(c.n_f, s.n_f);
        EXPECT_EQ(c.n_ho, s.n_ho);
        EXPECT_EQ(c.k2_basis.cols() % 2, 0);
        // K1 inside K2: projecting K1 onto K2 loses nothing.
        const RealMatrix proj = c.k2_basis * c.k2_basis.transpose() * c.k1_basis;
        EXPECT_LE((proj - c.k1_basis).norm(), 1e-8);
    }
}

TEST(FreeParticles, SingleFreeParticle) {
    const RealMatrix h = diag({0, 1});
    const RealMatrix j = canonical_j(1);
    const auto fp = free_particle_pairs(h, j, classify_dof(h));
    ASSERT_EQ(fp.e.cols(), 1);
    EXPECT_NEAR(fp.e(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(fp.e(1, 0), 0.0, 1e-14);
    EXPECT_NEAR(fp.f(0, 0), 0.0, 1e-14);
    EXPECT_NEAR(fp.f(1, 0), 1.0, 1e-14);
}

TEST(FreeParticles, TwoDecoupledParticlesGram) {
    const RealMatrix h = diag({0, 0, 1, 3});
    const RealMatrix j = canonical_j(2);
    const auto fp = free_particle_pairs(h, j, classify_dof(h));
    ASSERT_EQ(fp.e.cols(), 2);
    EXPECT_LE((fp.e.transpose() * j * fp.f - RealMatrix::Identity(2, 2)).norm(), 1e-12);
    EXPECT_LE((fp.e.transpose() * j * fp.e).norm(), 1e-12);
    EXPECT_LE((fp.f.transpose() * j * fp.f).norm(), 1e-12);
    EXPECT_LE((j * h * fp.f - fp.e).norm(), 1e-12);
}

TEST(FreeParticles, ChainsOnRandomSystems) {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = fixtures::structured_psd(1, 1 + trial % 3, {1.3}, rng, 0.4);
        const RealMatrix j = canonical_j(s.h.rows() / 2);
        const auto c = classify_dof(s.h);
        const auto fp = free_particle_pairs(s.h, j, c);
        const Index k = fp.e.cols();
        EXPECT_LE((fp.e.transpose() * j * fp.f - RealMatrix::Identity(k, k)).norm(), 1e-8);
        EXPECT_LE((fp.f.transpose() * j * fp.f).norm(), 1e-8);
        EXPECT_LE((j * s.h * fp.f - fp.e).norm(), 1e-8 * (1 + s.h.norm()));
    }
}

TEST(Nondynamical, ZeroHamiltonian) {
    const RealMatrix h = RealMatrix::Zero(2, 2);
    const RealMatrix j = canonical_j(1);
    const auto c = classify_dof(h);
    const auto fp = free_particle_pairs(h, j, c);
    const RealMatrix w = nondynamical_block(h, j, c, fp);
    EXPECT_EQ(fp.e.cols(), 0);
    ASSERT_EQ(w.cols(), 2);
    EXPECT_NEAR(std::abs(w.determinant()), 1.0, 1e-14);
}

TEST(Nondynamical, OrthogonalToFreeSector) {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = fixtures::structured_psd(1 + trial % 2, 1 + trial % 2, {0.7, 2.0}, rng, 0.4);
        const RealMatrix j = canonical_j(s.h.rows() / 2);
        const auto c = classify_dof(s.h);
        const auto fp = free_particle_pairs(s.h, j, c);
        const RealMatrix w = nondynamical_block(s.h, j, c, fp);
        EXPECT_LE((s.h * w).norm(), 1e-8 * s.h.norm());
        EXPECT_LE((w.transpose() * j * fp.f).norm(), 1e-8);
        EXPECT_LE((w.transpose() * j * fp.e).norm(), 1e-8);
        // W and the free pairs together span K2.
        RealMatrix all(w.rows(), w.cols() + 2 * fp.e.cols());
        all << w, fp.e, fp.f;
        EXPECT_EQ(rank_kernel(all).rank, c.k2_basis.cols());
        const RealMatrix proj = c.k2_basis * c.k2_basis.transpose() * all;
        EXPECT_LE((proj - all).norm(), 1e-7 * (1 + all.norm()));
    }
}

TEST(Harmonic, DiagonalOscillator) {
    const RealMatrix h = diag({1, 4});
    const auto hp = harmonic_pairs(h, canonical_j(1));
    ASSERT_EQ(hp.omega.size(), 1);
    EXPECT_NEAR(hp.omega(0), 2.0, 1e-12);
    RealMatrix s(2, 2);
    s << hp.e, hp.f;
    EXPECT_LE((s.transpose() * h * s - 2.0 * RealMatrix::Identity(2, 2)).norm(), 1e-12);
    EXPECT_NEAR(std::abs(s.determinant()), 1.0, 1e-12);
}

TEST(Harmonic, IsotropicTwoDof) {
    const RealMatrix h = RealMatrix::Identity(4, 4);
    const RealMatrix j = canonical_j(2);
    const auto hp = harmonic_pairs(h, j);
    ASSERT_EQ(hp.omega.size(), 2);
    EXPECT_NEAR(hp.omega(0), 1.0, 1e-12);
    EXPECT_NEAR(hp.omega(1), 1.0, 1e-12);
    EXPECT_LE((hp.e.transpose() * j * hp.f - RealMatrix::Identity(2, 2)).norm(), 1e-12);
    EXPECT_LE((hp.e.transpose() * j * hp.e).norm(), 1e-12);
    EXPECT_LE((hp.f.transpose() * j * hp.f).norm(), 1e-12);
}

TEST(Harmonic, EigenRelations) {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = fixtures::structured_psd(trial % 2, trial % 3 == 0, {2.0, 2.0, 0.5, 1.1}, rng, 0.3);
        const RealMatrix j = canonical_j(s.h.rows() / 2);
        const auto hp = harmonic_pairs(s.h, j);
        for (Index a = 0; a < hp.omega.size(); ++a) {
            EXPECT_NEAR(hp.omega(a), s.omega[static_cast<size_t>(a)], 1e-8);
            EXPECT_LE((j * s.h * hp.e.col(a) + hp.omega(a) * hp.f.col(a)).norm(), 1e-7 * (1 + s.h.norm()));
            EXPECT_LE((j * s.h * hp.f.col(a) - hp.omega(a) * hp.e.col(a)).norm(), 1e-7 * (1 + s.h.norm()));
            EXPECT_NEAR(symplectic_product(hp.e.col(a), j, hp.f.col(a)), 1.0, 1e-8);
        }
    }
}

TEST(NormalForm, DiagonalOscillatorIsIdentity) {
    const double w = 1.3;
    const RealMatrix h = w * RealMatrix::Identity(2, 2);
    const auto nf = normal_form(h);
    ASSERT_EQ(nf.omega.size(), 1);
    EXPECT_NEAR(nf.omega(0), w, 1e-14);
    EXPECT_LE((nf.s - RealMatrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(NormalForm, MixedSectorsRandom) {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 60; ++trial) {
        const Index nnd = trial % 3, nfr = (trial / 3) % 3;
        std::vector<double> w;
        for (int a = 0; a < 1 + trial % 4; ++a) w.push_back(0.3 + 0.5 * a);
        if (trial % 5 == 0) w.push_back(w.front());
        const auto s = fixtures::structured_psd(nnd, nfr, w, rng, 0.35);
        const auto nf = normal_form(s.h);
        EXPECT_EQ(nf.classification.n_nd, nnd);
        EXPECT_EQ(nf.classification.n_f, nfr);
        ASSERT_EQ(nf.omega.size(), static_cast<Index>(s.omega.size()));
        for (Index a = 0; a < nf.omega.size(); ++a) EXPECT_NEAR(nf.omega(a), s.omega[static_cast<size_t>(a)], 1e-8);
        expect_valid(s.h, nf);
    }
}

TEST(NormalForm, SymplecticWOption) {
    std::mt19937 rng(41);
    const auto s = fixtures::structured_psd(2, 1, {1.0, 0.4}, rng, 0.4);
    const auto nf = normal_form(s.h, {}, {.symplectic_w = true});
    EXPECT_LE((nf.w_block - canonical_j(2)).norm(), 1e-9);
    expect_valid(s.h, nf);
    const RealMatrix j = canonical_j(s.h.rows() / 2);
    // With a symplectic W the whole S is symplectic after reordering columns.
    EXPECT_NEAR(std::abs(nf.s.determinant()), 1.0, 1e-8);
    (void)j;
}

TEST(NormalForm, ScaleInvariance) {
    std::mt19937 rng(43);
    const auto s = fixtures::structured_psd(1, 1, {1.0, 0.25}, rng, 0.3);
    const auto a = normal_form(s.h);
    const auto b = normal_form(1e12 * s.h);
    EXPECT_EQ(b.classification.n_nd, 1);
    EXPECT_EQ(b.classification.n_f, 1);
    for (Index k = 0; k < 2; ++k) EXPECT_NEAR(b.omega(k) / 1e12, a.omega(k), 1e-9);
    // Free-particle chains split the scale between E and F, so compare relative residuals.
    EXPECT_LE(b.residuals.h / (b.s.squaredNorm() * 1e12 * s.h.norm()), 1e-12);
    EXPECT_LE(b.residuals.j / b.s.squaredNorm(), 1e-12);
}

TEST(NormalForm, SpectralConsistency) {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = fixtures::structured_psd(0, 0, {0.5 + trial * 0.1, 1.7, 2.3}, rng, 0.3);
        const auto nf = normal_form(s.h);
        const auto ep = eig_nonsymmetric(canonical_j(s.h.rows() / 2) * s.h);
        std::vector<double> imag;
        for (Index i = 0; i < ep.values.size(); ++i) {
            EXPECT_NEAR(ep.values(i).real(), 0.0, 1e-8);
            if (ep.values(i).imag() > 0) imag.push_back(ep.values(i).imag());
        }
        std::sort(imag.begin(), imag.end(), std::greater<>());
        ASSERT_EQ(static_cast<Index>(imag.size()), nf.omega.size());
        for (Index a = 0; a < nf.omega.size(); ++a) EXPECT_NEAR(imag[static_cast<size_t>(a)], nf.omega(a), 1e-8);
    }
}

TEST(NormalForm, EmptyAndZero) {
    const auto e = normal_form(RealMatrix(0, 0));
    EXPECT_EQ(e.s.size(), 0);
    const auto z = normal_form(RealMatrix::Zero(4, 4));
    EXPECT_EQ(z.classification.n_nd, 2);
    EXPECT_EQ(z.omega.size(), 0);
}

TEST(NormalForm, RejectsIndefinite) {
    EXPECT_EQ(code_of([] { normal_form(diag({1, -2})); }), ErrorCode::NotPSD);
}
