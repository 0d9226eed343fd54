#include "symq/circuit.hpp"
#include "symq/error.hpp"
#include "symq/models.hpp"
#include "symq/williamson.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace symq;

namespace {

RealMatrix permuted(const RealMatrix& h, const std::vector<Index>& order) {
    const Index n = static_cast<Index>(order.size());
    RealMatrix out(n, n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) out(a, b) = h(order[static_cast<size_t>(a)], order[static_cast<size_t>(b)]);
    return out;
}

// Printed parametric Hamiltonian of the black-box example after the shift and rescaling,
// ordered (Q, Phi_c, P, Pi_c, Phi_J, Pi_J), for turns n11 = n12 = n22 = 1, n21 = 0.
RealMatrix printed_blackbox(double om, double omc, double omj) {
    const double s = std::sqrt(om * omc);
    const double a = 2.0 * std::pow(omj, 1.5) / std::sqrt(om);
    const double w = omj * omj / om;
    RealMatrix h = RealMatrix::Zero(12, 12);
    h.row(0) << om / 4, 0, s / 2, s / 2, 0, -om / 2, 0, 0, 0, 0, 0, 0;
    h.row(1) << 0, om / 4, -s / 2, 0, om / 2, 0, 0, 0, 0, 0, 0, 0;
    h.row(2) << s / 2, -s / 2, 2 * omc, omc, -s, -s, 0, 0, 0, 0, 0, 0;
    h.row(3) << s / 2, 0, omc, omc, 0, -s, 0, 0, 0, 0, 0, 0;
    h.row(4) << 0, om / 2, -s, 0, 8 * w + om, -4 * w, 0, 0, 0, 0, a, a;
    h.row(5) << -om / 2, 0, -s, -s, -4 * w, 4 * w + om, 0, 0, 0, 0, -a, 0;
    h(6, 6) = omc;
    h(7, 7) = omc;
    h.row(10) << 0, 0, 0, 0, a, -a, 0, 0, 0, 0, omj, 0;
    h.row(11) << 0, 0, 0, 0, a, 0, 0, 0, 0, 0, 0, omj;
    return h;
}

double symplectic_defect(const RealMatrix& t) {
    const RealMatrix j = canonical_j(t.rows() / 2);
    return (t.transpose() * j * t - j).norm();
}

} // namespace

TEST(Circuit, LccMatrices) {
    const auto cs = lcc_circuit(2.0, 3.0, 5.0);
    EXPECT_EQ(cs.c, (RealMatrix(2, 2) << 2, 0, 0, 3).finished());
    EXPECT_EQ(cs.l, (RealMatrix(1, 1) << 5).finished());
    EXPECT_EQ(cs.d, (RealMatrix(1, 2) << 1, 1).finished());
    EXPECT_EQ(cs.z, RealMatrix::Zero(1, 1));
    ASSERT_EQ(cs.registry.size(), 3u);
    EXPECT_EQ(cs.registry[0].label, "Q_l1");
    EXPECT_EQ(cs.registry[1].kind, CoordinateKind::Flux);
    EXPECT_EQ(cs.layout().labels[4], "Pi_c1");
}

TEST(Circuit, LccClassificationAndFrequency) {
    const double c1 = 1.3, c2 = 0.4, l = 2.2;
    const auto hs = legendre(lcc_circuit(c1, c2, l));
    ASSERT_EQ(hs.h.rows(), 6);
    const auto nf = normal_form(hs.h);
    EXPECT_EQ(nf.classification.n_f, 1);
    EXPECT_EQ(nf.classification.n_nd, 1);
    EXPECT_EQ(nf.classification.n_ho, 1);
    // Inductor in series with both capacitors: omega^2 = (1/c1 + 1/c2) / l.
    EXPECT_NEAR(nf.omega(0), std::sqrt((1 / c1 + 1 / c2) / l), 1e-12);
}

TEST(Circuit, LccMatchesWorkedExampleUpToFluxSign) {
    const double c1 = 1.3, c2 = 0.4, l = 2.2;
    const auto hs = legendre(lcc_circuit(c1, c2, l));
    // Worked-example form with (P - D Phi).
    RealMatrix a = RealMatrix::Zero(1, 6);
    a << 0, -1, -1, 1, 0, 0;
    RealMatrix worked = a.transpose() * a / l;
    worked(4, 4) = 1 / c1;
    worked(5, 5) = 1 / c2;
    const RealVector flip = (RealVector(6) << 1, -1, -1, 1, -1, -1).finished();
    const RealMatrix t = flip.asDiagonal();
    EXPECT_LE((t * hs.h * t - worked).norm(), 1e-14);
}

TEST(Circuit, SingleCapacitorIsFreeParticle) {
    const auto cs = build_circuit(parse_netlist("C c 2.5"));
    EXPECT_EQ(cs.d.size(), 0);
    const auto hs = legendre(cs);
    EXPECT_LE((hs.h - (RealMatrix(2, 2) << 0, 0, 0, 0.4).finished()).norm(), 1e-15);
    const auto cls = classify_dof(hs.h);
    EXPECT_EQ(cls.n_f, 1);
    EXPECT_EQ(cls.n_nd, 0);
    EXPECT_EQ(cls.n_ho, 0);
}

TEST(Circuit, PureLcFrequency) {
    const auto hs = legendre(build_circuit(parse_netlist("C c 2\nL l 3 c:+")));
    const auto nf = normal_form(hs.h);
    EXPECT_EQ(nf.classification.n_ho, 1);
    EXPECT_EQ(nf.classification.n_nd, 1);
    EXPECT_NEAR(nf.omega(0), 1.0 / std::sqrt(6.0), 1e-12);
}

TEST(Circuit, EmptyNetlist) {
    const auto hs = legendre(build_circuit(parse_netlist("")));
    EXPECT_EQ(hs.h.rows(), 0);
    EXPECT_EQ(hs.layout.n, 0);
}

TEST(Transformers, IdentityTransformerMatchesDirectIncidence) {
    const auto direct = build_circuit(parse_netlist("C c 1\nL l 2 c:+"));
    const auto via = build_circuit(parse_netlist("C c 1\nL l 2\nTR t left=c:+ right=l:+ turns=1"));
    EXPECT_EQ(direct.d, via.d);
}

TEST(Transformers, ZeroTurnsSeversCoupling) {
    const auto cs = build_circuit(parse_netlist("C a 1\nC b 1\nL l 2\nTR t left=a:+;b:+ right=l:+ turns=0;0"));
    EXPECT_EQ(cs.d, RealMatrix::Zero(1, 2));
}

TEST(Transformers, BlackBoxComposition) {
    BlackBoxParams p;
    p.turns = {0.7, 1.1, 0.3, 1.9};
    const auto cs = blackbox_circuit(p);
    // Capacitor order (cca, ccb, cJa, cJb): left ports are (cJa + cca) and (cJb + ccb).
    RealMatrix dl(2, 4);
    dl << 1, 0, 1, 0, 0, 1, 0, 1;
    RealMatrix dr(2, 4);
    dr << -1, 0, -1, 0, 0, -1, 0, -1;
    RealMatrix n(2, 4);
    n << 0.7, 1.1, 0, 0, 0, 0, 0.3, 1.9;
    EXPECT_LE((cs.d - dr * n.transpose() * dl).norm(), 1e-15);
    const auto eliminated = eliminate_transformers(blackbox_netlist(p));
    EXPECT_TRUE(eliminated.transformers.empty());
    EXPECT_FALSE(has_errors(validate(eliminated)));
}

TEST(Circuit, AssembleRejectsTransformers) {
    const auto n = parse_netlist("C c 1\nL l 2\nTR t left=c:+ right=l:+ turns=1");
    EXPECT_EQ(fixtures::error_code_of([&] { assemble_lagrangian(n); }), ErrorCode::InvalidNetlist);
}

TEST(Circuit, InvalidNetlistsRejected) {
    EXPECT_EQ(fixtures::error_code_of([] { build_circuit(parse_netlist("C c 1\nJJ j 1")); }),
              ErrorCode::InvalidNetlist);
    EXPECT_EQ(fixtures::error_code_of([] { build_circuit(parse_netlist("L a 1\nL b 1\nL c 1\nCIRC k 1 a b c")); }),
              ErrorCode::UnsupportedElement);
}

TEST(Circuit, CirculatorWithScatteringMatrix) {
    const auto cs = build_circuit(parse_netlist("L a 1\nL b 1\nL c 1\nCIRC k 2 a b c s=0,0,0.5,0.5,0,0,0,0.5,0"));
    EXPECT_LE((cs.z + cs.z.transpose()).norm(), 1e-15);
    EXPECT_GT(cs.z.norm(), 0.1);
    EXPECT_TRUE(check_psd(legendre(cs).h));
}

TEST(Circuit, GyratorIsAntisymmetricBlock) {
    const auto cs = blackbox_circuit(BlackBoxParams{});
    EXPECT_LE((cs.z + cs.z.transpose()).norm(), 0.0);
    EXPECT_DOUBLE_EQ(cs.z(0, 1), -1.0);
    EXPECT_DOUBLE_EQ(cs.z(1, 0), 1.0);
    EXPECT_EQ(cs.n(), 6);
    ASSERT_EQ(cs.nonlinear.size(), 2u);
    EXPECT_EQ(cs.nonlinear[0].coordinate, 4);
    EXPECT_EQ(cs.registry[4].role, CoordinateRole::Junction);
    EXPECT_TRUE(cs.registry[4].compact);
    EXPECT_EQ(cs.registry[2].role, CoordinateRole::Coupling);
}

TEST(Circuit, BlackBoxKernelParametrization) {
    const auto cs = blackbox_circuit(BlackBoxParams{});
    const auto hs = legendre(cs);
    std::mt19937 rng(3);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 5; ++trial) {
        RealVector q(2), phi(4);
        for (auto& x : q) x = dist(rng);
        for (auto& x : phi) x = dist(rng);
        RealVector v = RealVector::Zero(12);
        v.head(2) = q;
        v.segment(2, 4) = phi;
        v.segment(6, 2) = 0.5 * cs.z * q - cs.d * phi;
        EXPECT_LE((hs.h * v).norm(), 1e-12);
    }
    const auto cls = classify_dof(hs.h);
    EXPECT_EQ(cls.k1_basis.cols(), 6);
    EXPECT_EQ(cls.k2_basis.cols(), 6 + rank_kernel(cs.d).basis.cols());
    EXPECT_EQ(cls.n_f, 2);
    EXPECT_EQ(cls.n_nd, 2);
    EXPECT_EQ(cls.n_ho, 2);
}

TEST(Circuit, ZeroTurnsChangesClassification) {
    BlackBoxParams p;
    p.turns = {0, 0, 0, 0};
    const auto cs = blackbox_circuit(p);
    EXPECT_EQ(cs.d, RealMatrix::Zero(2, 4));
    EXPECT_EQ(rank_kernel(cs.d.transpose()).basis.cols(), 2);
    const auto cls = classify_dof(legendre(cs).h);
    EXPECT_EQ(cls.n_f, 4);
    EXPECT_EQ(cls.n_nd, 1);
    EXPECT_EQ(cls.n_ho, 1);
}

TEST(ChargeShift, BlackBoxMatchesClosedForm) {
    const BlackBoxParams p{2.0, 3.0, 5.0, 1.7};
    const auto cs = blackbox_circuit(p);
    const auto raw = legendre(cs);
    const auto shifted = charge_shift(raw);
    ASSERT_EQ(shifted.provenance.size(), 1u);
    const RealMatrix& t = shifted.provenance[0].matrix;
    EXPECT_LE(symplectic_defect(t), 1e-12);
    const RealMatrix dj = cs.d.rightCols(2);
    const RealMatrix zinv = cs.z.inverse();
    EXPECT_LE((t.block(0, 4, 2, 2) - 2 * zinv * dj).norm(), 1e-12);
    EXPECT_LE((t.block(10, 6, 2, 2) - 2 * dj.transpose() * zinv).norm(), 1e-12);
    for (Index f : {4, 5}) {
        EXPECT_EQ(shifted.h.row(f).norm(), 0.0);
        EXPECT_EQ(shifted.h.col(f).norm(), 0.0);
    }
    // Dressed inverse inductance on the charge momenta.
    const RealMatrix cj_inv = RealMatrix::Identity(2, 2) / cs.c(2, 2);
    const RealMatrix dressed = cs.l.inverse() - 4 * zinv * dj * cj_inv * dj.transpose() * zinv;
    EXPECT_LE((shifted.h.block(6, 6, 2, 2) - dressed).norm(), 1e-12);
    // Same dynamics: the transform conjugates the generators.
    const RealMatrix j = canonical_j(6);
    EXPECT_LE((t * j * shifted.h - j * raw.h * t).norm(), 1e-10);
    // Junction covectors are unchanged.
    EXPECT_LE((shifted.potential[0].covector - raw.potential[0].covector).norm(), 0.0);
}

TEST(ChargeShift, NoJunctionsIsIdentity) {
    const auto hs = charge_shift(legendre(lcc_circuit(1, 2, 3)));
    ASSERT_EQ(hs.provenance.size(), 1u);
    EXPECT_EQ(hs.provenance[0].matrix, RealMatrix::Identity(6, 6));
}

TEST(ChargeShift, SingularZRejected) {
    const auto hs = legendre(build_circuit(parse_netlist("C c 1\nC cj 1\nL l 1 cj:+ c:+\nJJ j 1 cj")));
    EXPECT_EQ(fixtures::error_code_of([&] { charge_shift(hs); }), ErrorCode::SingularZ);
}

TEST(ChargeShift, DecoupledIslandsNeedNoZ) {
    const auto hs = charge_shift(legendre(build_circuit(parse_netlist("C a 1\nC b 2\nJJ ja 1 a\nJJ jb 1 b"))));
    EXPECT_EQ(hs.provenance[0].matrix, RealMatrix::Identity(4, 4));
}

TEST(ChargeShift, CompactCoordinatesLeaveQuadraticPart) {
    const auto hs = blackbox_hamiltonian(BlackBoxParams{1.3, 0.8, 2.1, 0.6, {0.9, 1.2, 0.4, 1.5}});
    for (size_t i = 0; i < hs.coordinates.size(); ++i) {
        if (!hs.coordinates[i].compact) continue;
        EXPECT_EQ(hs.h.row(static_cast<Index>(i)).norm(), 0.0);
    }
}

TEST(Rescale, BlackBoxMatchesPrintedParametricMatrix) {
    for (const auto& [om, omc, omj, r] : std::vector<std::array<double, 4>>{{1, 1, 1, 1}, {2, 3, 5, 1.7}, {0.4, 1.3, 0.9, 50}}) {
        const auto hs = blackbox_hamiltonian(BlackBoxParams{om, omc, omj, r});
        const RealMatrix shown = permuted(hs.h, hs.display_order());
        const RealMatrix expected = printed_blackbox(om, omc, omj);
        EXPECT_LE((shown - expected).norm(), 1e-10 * expected.norm()) << om << ' ' << omc << ' ' << omj;
    }
}

TEST(Rescale, DisplayOrderOfBlackBox) {
    const auto hs = blackbox_hamiltonian(BlackBoxParams{});
    EXPECT_EQ(hs.display_order(), (std::vector<Index>{0, 1, 2, 3, 6, 7, 8, 9, 4, 5, 10, 11}));
    EXPECT_DOUBLE_EQ(hs.charge_scale, 1.0);
    EXPECT_DOUBLE_EQ(hs.reference_inductance, 1.0);
}

TEST(Rescale, UnitValuesGiveIdentity) {
    const auto hs = legendre(build_circuit(parse_netlist("C a 1\nC b 1\nL l 1 a:+ b:-\nL k 1 a:+\nGYR g 1 l k")));
    EXPECT_EQ(rescale_matrix(hs), RealMatrix::Identity(8, 8));
}

TEST(Rescale, RoundTrip) {
    const auto hs = charge_shift(legendre(blackbox_circuit(BlackBoxParams{2.0, 3.0, 5.0, 1.7})));
    const auto scaled = rescale(hs);
    const RealMatrix t = scaled.provenance.back().matrix;
    const auto back = apply_transform(scaled, t.inverse(), "rescale inverse");
    EXPECT_LE((back.h - hs.h).norm(), 1e-12 * hs.h.norm());
    for (const auto& step : back.provenance) EXPECT_LE(symplectic_defect(step.matrix), 1e-10);
    EXPECT_LE((back.total_transform() - hs.total_transform()).norm(), 1e-12);
}

TEST(Rescale, ExplicitScales) {
    const auto hs = legendre(build_circuit(parse_netlist("C a 16\nL l 1 a:+")));
    const RealMatrix t = rescale_matrix(hs, {4.0, 1.0});
    EXPECT_DOUBLE_EQ(t(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(t(2, 2), 2.0);
    EXPECT_DOUBLE_EQ(t(1, 1), 0.5);
    EXPECT_DOUBLE_EQ(t(3, 3), 2.0);
}

TEST(ApplyTransform, RejectsNonSymplectic) {
    const auto hs = legendre(lcc_circuit(1, 2, 3));
    RealMatrix t = RealMatrix::Identity(6, 6);
    t(0, 0) = 2.0;
    EXPECT_EQ(fixtures::error_code_of([&] { apply_transform(hs, t, "bad"); }), ErrorCode::VerificationFailure);
}

// Hamilton's equations reproduce C Phi'' + D^T Q' = 0 and L Q'' - D Phi' + Z Q' = 0.
TEST(Circuit, KirchhoffConsistency) {
    std::mt19937 rng(11);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 20; ++trial) {
        std::ostringstream extra;
        if (trial % 2 == 1) extra << "GYR g 0.8 l0 l1\n";
        auto text = serialize(fixtures::random_lc_netlist(3, 2, 0.6, rng)) + extra.str();
        const auto cs = build_circuit(parse_netlist(text));
        const auto hs = legendre(cs);
        const Index ml = cs.charges(), nc = cs.fluxes(), n = cs.n();
        const RealMatrix jh = canonical_j(n) * hs.h;
        RealVector x0(2 * n);
        for (auto& v : x0) v = dist(rng);
        for (double t : {0.0, 0.7, 3.0}) {
            const RealVector x = expm(jh, t) * x0;
            const RealVector dx = jh * x;
            const RealVector ddx = jh * dx;
            const RealVector qd = dx.head(ml), phid = dx.segment(ml, nc);
            const RealVector qdd = ddx.head(ml), phidd = ddx.segment(ml, nc);
            EXPECT_LE((cs.c * phidd + cs.d.transpose() * qd).norm(), 1e-6 * (1 + x.norm()));
            EXPECT_LE((cs.l * qdd - cs.d * phid + cs.z * qd).norm(), 1e-6 * (1 + x.norm()));
        }
    }
}

TEST(Circuit, LcCountingLaw) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const Index nc = 1 + trial % 5, ml = 1 + (trial / 5) % 4;
        const auto cs = build_circuit(fixtures::random_lc_netlist(nc, ml, 0.5, rng));
        const auto cls = classify_dof(legendre(cs).h);
        const Index nf = rank_kernel(cs.d).basis.cols() + rank_kernel(cs.d.transpose()).basis.cols();
        EXPECT_EQ(cls.n_f, nf);
        EXPECT_EQ(cls.n_nd, (nc + ml - nf) / 2);
        EXPECT_EQ(cls.n_ho, cls.n_nd);
    }
}
