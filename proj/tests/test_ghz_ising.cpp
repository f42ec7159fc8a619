#include <spinforge/ghz_ising.hpp>

#include <gtest/gtest.h>

using namespace spinforge;

namespace {

IsingChain hand_chain() {
    IsingChain c;
    c.n = 4;
    c.b = {1.1, 2.0, 2.3, 0.9};
    c.j = {1.8, 2.6, 1.7};
    return c;
}

}  // namespace

TEST(IsingFromPst, Identification) {
    const IsingChain c2 = ising_from_pst(standard_couplings(4));
    ASSERT_EQ(c2.n, 2);
    EXPECT_NEAR(c2.b[0], std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(c2.b[1], std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(c2.j[0], 2.0, 1e-15);

    const IsingChain c3 = ising_from_pst(standard_couplings(6));
    EXPECT_NEAR(c3.b[0], std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(c3.b[1], 3.0, 1e-15);
    EXPECT_NEAR(c3.b[2], std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(c3.j[0], std::sqrt(8.0), 1e-15);
    EXPECT_NEAR(c3.j[1], std::sqrt(8.0), 1e-15);

    const IsingChain c1 = ising_from_pst(standard_couplings(2));
    EXPECT_EQ(c1.n, 1);
    EXPECT_DOUBLE_EQ(c1.b[0], 1.0);
    EXPECT_TRUE(c1.j.empty());
}

TEST(IsingFromPst, OddLengthRejected) { EXPECT_THROW(ising_from_pst(standard_couplings(5)), InvalidInput); }

TEST(BuildH1, BandAndAntisymmetry) {
    const MajoranaMatrix m1 = build_h1(ising_from_pst(standard_couplings(2)));
    ASSERT_EQ(m1.modes(), 2);
    EXPECT_DOUBLE_EQ(m1.s(0, 1), 1.0);

    const MajoranaMatrix m = build_h1(standard_ising(2));
    EXPECT_NEAR(m.s(0, 1), std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(m.s(1, 2), 2.0, 1e-15);
    EXPECT_NEAR(m.s(2, 3), std::sqrt(3.0), 1e-15);

    const MajoranaMatrix h = build_h1(hand_chain());
    EXPECT_EQ(Mat(h.s + h.s.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DSimilarity, RoundTripsToPstChain) {
    const RealSymTridiag t = d_similarity(build_h1(standard_ising(2)));
    const RealSymTridiag want = standard_couplings(4).matrix();
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(t.offdiag[k], want.offdiag[k], 1e-15);
    for (double d : t.diag) EXPECT_EQ(d, 0.0);
}

TEST(DSimilarity, ZeroMatrix) {
    const RealSymTridiag t = d_similarity(MajoranaMatrix{Mat::Zero(4, 4)});
    for (double o : t.offdiag) EXPECT_EQ(o, 0.0);
}

TEST(DSimilarity, SpectraAgree) {
    const MajoranaMatrix m = build_h1(hand_chain());
    const CMat h1 = Complex(0, 1) * m.s.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMat> es(h1);
    const EigenSystem ts = eig_sym_tridiag(d_similarity(m));
    for (int k = 0; k < 8; ++k) EXPECT_NEAR(es.eigenvalues()(k), ts.spectrum.values[static_cast<std::size_t>(k)], 1e-10);
}

TEST(MajoranaSpectrum, OddIntegers) {
    const MajoranaMatrix m = build_h1(standard_ising(6));
    const CMat h1 = Complex(0, 1) * m.s.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMat> es(h1);
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(es.eigenvalues()(k), -11.0 + 2 * k, 1e-9);
}

TEST(GhzTarget, Amplitudes) {
    const CVec g1 = ghz_target(1);
    EXPECT_NEAR(std::abs(g1[0] - 1 / std::sqrt(2.0)), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(g1[1] - Complex(0, -1 / std::sqrt(2.0))), 0.0, 1e-16);
    const CVec g3 = ghz_target(3);
    for (int k = 1; k < 7; ++k) EXPECT_EQ(g3[k], Complex(0, 0));
    EXPECT_NEAR(g3.norm(), 1.0, 1e-15);
}

TEST(BruteForce, ZeroTimeAndNorm) {
    const IsingChain c = hand_chain();
    const CVec psi = basis_state(4, 5);
    EXPECT_EQ((brute_force_evolve(c, 0.0, psi) - psi).norm(), 0.0);
    EXPECT_NEAR(brute_force_evolve(c, 1.3, psi).norm(), 1.0, 1e-10);
}

TEST(BruteForce, SizeLimit) {
    EXPECT_THROW(brute_force_evolve(standard_ising(13), 0.1, basis_state(13, 0)), InvalidInput);
}

TEST(BruteForce, HandChainOverlap) {
    EXPECT_NEAR(ghz_overlap_exact(hand_chain(), pi / 4).overlap, 0.5183020319908319, 1e-10);
}

// The Majorana transfer time pi/2 corresponds to Hamiltonian time pi/4.
TEST(BruteForce, FactorOfTwoAtThreeQubits) {
    EXPECT_GE(ghz_overlap_exact(standard_ising(3), pi / 4).overlap, 1 - 1e-8);
    EXPECT_LT(ghz_overlap_exact(standard_ising(3), pi / 2).overlap, 0.9);
    EXPECT_DOUBLE_EQ(ghz_time(), pi / 4);
}

TEST(BruteForce, GhzPhaseMatches) {
    for (int n = 1; n <= 8; ++n) {
        const CVec out = brute_force_evolve(standard_ising(n), ghz_time(), basis_state(n, 0));
        EXPECT_LE((out - ghz_phase(n) * ghz_target(n)).norm(), 1e-9) << n;
    }
}

TEST(BruteForce, TwoHalfPeriodsGiveAllOnes) {
    for (int n = 1; n <= 8; ++n) {
        const IsingChain c = standard_ising(n);
        const Complex w = ghz_phase(n);
        CVec s = basis_state(n, 0);
        s = brute_force_evolve(c, ghz_time(), s) / w;
        s = brute_force_evolve(c, ghz_time(), s) / w;
        const CVec want = Complex(0, -1) * basis_state(n, (std::uint64_t{1} << n) - 1);
        EXPECT_LE((s - want).norm(), 1e-8) << n;
    }
}

TEST(MajoranaTransfer, PstChainsTransfer) {
    EXPECT_LE(majorana_transfer_check(standard_ising(2)), 1e-12);
    EXPECT_LE(majorana_transfer_check(standard_ising(21)), 1e-9);
}

TEST(MajoranaTransfer, SignedMirrorPattern) {
    const Mat u = majorana_transfer(standard_ising(2), pi / 2);
    EXPECT_NEAR(u(3, 0), -1.0, 1e-12);
    EXPECT_NEAR(u(2, 1), 1.0, 1e-12);
    EXPECT_NEAR(u(1, 2), -1.0, 1e-12);
    EXPECT_NEAR(u(0, 3), 1.0, 1e-12);
}

TEST(MajoranaTransfer, PerturbationBreaksTransfer) {
    const IsingChain c = perturbed_sample(standard_ising(21), 5.0, 11, 0);
    EXPECT_GT(majorana_transfer_check(c), 1e-3);
}

TEST(BasisMap, Rule) {
    EXPECT_EQ(basis_map("0000").reversed, "0000");
    EXPECT_EQ(basis_map("0000").rule, "GHZ");
    EXPECT_EQ(basis_map("1000").reversed, "0001");
    EXPECT_EQ(basis_map("1000").rule, "X on sites {4} applied to GHZ");
    EXPECT_THROW(basis_map("10a0"), InvalidInput);
}

TEST(BasisMap, AllInputsMatchBruteForce) {
    for (int n = 1; n <= 6; ++n) {
        const IsingChain c = standard_ising(n);
        const Complex w = ghz_phase(n);
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            std::string bits(static_cast<std::size_t>(n), '0');
            for (int q = 0; q < n; ++q)
                if (x >> q & 1) bits[static_cast<std::size_t>(q)] = '1';
            const CVec out = brute_force_evolve(c, ghz_time(), basis_state(n, x)) / w;
            EXPECT_LE((out - basis_map_state(bits)).norm(), 1e-8) << n << " " << bits;
        }
    }
}

TEST(OverlapEstimate, PerfectChains) {
    const GhzReport r2 = overlap_estimate(standard_ising(2));
    EXPECT_NEAR(r2.overlap, 1.0, 1e-9);
    EXPECT_NEAR(std::abs(r2.transfer_amplitude), 1.0, 1e-12);
    EXPECT_NEAR(overlap_estimate(standard_ising(21)).overlap, 1.0, 1e-6);
}

TEST(OverlapEstimate, HandChain) {
    const GhzReport r = overlap_estimate(hand_chain());
    EXPECT_NEAR(r.raw_overlap, 0.258480202700462, 1e-10);
    EXPECT_EQ(r.method, GhzReport::Method::estimator);
    EXPECT_DOUBLE_EQ(r.time, pi / 4);
}

TEST(OverlapEstimate, AgreesWithBruteForceUnderSmallNoise) {
    int good = 0;
    for (int s = 0; s < 40; ++s) {
        const IsingChain c = perturbed_sample(standard_ising(5), 3.0, 99, static_cast<std::uint64_t>(s));
        if (std::abs(overlap_estimate(c).overlap - ghz_overlap_exact(c, ghz_time()).overlap) <= 0.05) ++good;
    }
    EXPECT_GE(good, 36);
}

TEST(PerturbSweep, ZeroNoiseIsIdentical) {
    const SweepPoint p = perturb_sweep(8, 0.0, 20, 1, 1);
    for (double v : p.values) EXPECT_EQ(v, p.values.front());
    EXPECT_NEAR(p.mean, 1.0, 1e-12);
    EXPECT_EQ(p.stddev, 0.0);
}

TEST(PerturbSweep, ThreadIndependent) {
    const SweepPoint a = perturb_sweep(10, 4.0, 37, 5, 1);
    const SweepPoint b = perturb_sweep(10, 4.0, 37, 5, 3);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.mean, b.mean);
}

TEST(PerturbSweep, SampleStreamsDoNotDependOnCount) {
    const SweepPoint a = perturb_sweep(6, 2.0, 10, 8, 1);
    const SweepPoint b = perturb_sweep(6, 2.0, 25, 8, 1);
    for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(a.values[k], b.values[k]);
}

TEST(PerturbSweep, Validation) {
    EXPECT_THROW(perturb_sweep(4, 1.0, 0, 1), InvalidInput);
    EXPECT_THROW(perturb_sweep(4, -1.0, 5, 1), InvalidInput);
}

TEST(PerturbSample, WithinRange) {
    const IsingChain base = standard_ising(7);
    const IsingChain c = perturbed_sample(base, 10.0, 3, 4);
    for (int q = 0; q < 7; ++q) EXPECT_LE(std::abs(c.b[q] / base.b[q] - 1.0), 0.1 + 1e-15);
    for (int q = 0; q < 6; ++q) EXPECT_LE(std::abs(c.j[q] / base.j[q] - 1.0), 0.1 + 1e-15);
}
