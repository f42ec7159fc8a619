#include <spinforge/cloning.hpp>

#include <gtest/gtest.h>

using namespace spinforge;

namespace {

Eigen::Vector2cd random_input(std::mt19937_64& rng) {
    Eigen::Vector2cd v(Complex(uniform(rng, -1, 1), uniform(rng, -1, 1)), Complex(uniform(rng, -1, 1), uniform(rng, -1, 1)));
    return v / v.norm();
}

}  // namespace

TEST(Profile, Normalisation) {
    const AsymmetryProfile p = make_profile({2, 1, 1});
    EXPECT_NEAR(p.a * p.a + p.b2, 1.0, 1e-15);
    EXPECT_NEAR(p.betas[0] / p.betas[1], 2.0, 1e-15);
    EXPECT_THROW(make_profile({1, -1}), InvalidInput);
    EXPECT_THROW(make_profile({0, 0}), InvalidInput);
}

TEST(AnalyticFidelity, SymmetricValues) {
    EXPECT_NEAR(analytic_fidelity(symmetric_profile(2), 1), 5.0 / 6.0, 1e-15);
    EXPECT_NEAR(analytic_fidelity(symmetric_profile(3), 2), 7.0 / 9.0, 1e-15);
    EXPECT_NEAR(analytic_fidelity(symmetric_profile(11), 5), 23.0 / 33.0, 1e-15);
}

TEST(AnalyticFidelity, AsymmetricOracle) {
    const AsymmetryProfile p = make_profile({2, 1, 1});
    EXPECT_NEAR(analytic_fidelity(p, 1), 29.0 / 33.0, 1e-15);
    EXPECT_NEAR(analytic_fidelity(p, 2), 47.0 / 66.0, 1e-15);
    EXPECT_NEAR(analytic_fidelity(p, 3), 47.0 / 66.0, 1e-15);
}

TEST(AnalyticFidelity, LiteralFormulaDiffers) {
    EXPECT_GT(std::abs(analytic_fidelity(symmetric_profile(11), 1, FidelityFormula::literal) - 23.0 / 33.0), 0.05);
}

TEST(ProfileFromFidelities, SymmetricRecoversOptimum) {
    const ProfileFit f = profile_from_fidelities({0.9, 0.9, 0.9});
    for (double v : f.fidelities) EXPECT_NEAR(v, 7.0 / 9.0, 1e-10);
    EXPECT_NEAR(f.scale, (7.0 / 9.0 - 0.5) / 0.4, 1e-10);
}

TEST(ProfileFromFidelities, RoundTrip) {
    const AsymmetryProfile p = make_profile({2, 1, 1});
    const ProfileFit f = profile_from_fidelities({29.0 / 33.0, 47.0 / 66.0, 47.0 / 66.0});
    EXPECT_NEAR(f.scale, 1.0, 1e-10);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(f.profile.betas[static_cast<std::size_t>(c)], p.betas[static_cast<std::size_t>(c)], 1e-10);
    EXPECT_THROW(profile_from_fidelities({0.4, 0.9}), InvalidInput);
}

TEST(CompressedState, DenseEmbeddingAndReducedDensity) {
    auto rng = sample_stream(3, 0);
    for (int m : {3, 5, 7}) {
        CompressedState s = CompressedState::zero(m);
        s.amp0 = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
        s.amp1 = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
        for (int a = 0; a < m; ++a) {
            s.one_exc[a] = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
            s.m_minus_one_exc[a] = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
        }
        s = s.scaled(1.0 / s.norm());
        const CVec d = s.to_dense();
        EXPECT_NEAR(d.norm(), 1.0, 1e-12);
        for (int site = 1; site <= m; ++site)
            EXPECT_LE((reduced_density(s, site) - reduced_qubit(d, m, site - 1)).cwiseAbs().maxCoeff(), 1e-12) << m << " " << site;
    }
}

TEST(CloneMapTarget, FidelitiesMatchFormula) {
    for (auto raw : std::vector<std::vector<double>>{{1, 1}, {1, 1, 1}, {2, 1, 1}, {1, 3, 2, 0.5}}) {
        const AsymmetryProfile p = make_profile(raw);
        for (int c = 1; c <= p.n_clones; ++c) {
            const double f = average_fidelity([&](const Eigen::Vector2cd& psi) {
                return reduced_density(clone_map_target(p, psi), 2 * c - 1);
            });
            EXPECT_NEAR(f, analytic_fidelity(p, c), 1e-12);
        }
    }
}

// <psi|rho|psi> averaged over the design is tr(rho)/2, as for Haar.
TEST(DesignAverage, FixedDensity) {
    Eigen::Matrix2cd rho;
    rho << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
    const double design = average_fidelity([&](const Eigen::Vector2cd&) { return rho; });
    EXPECT_NEAR(design, 0.5, 1e-15);
}

TEST(OddSupport, Checks) {
    EXPECT_TRUE(odd_support_check(odd_uniform_target(5), {0, 0, 0, 0, 0}).pass);
    EXPECT_FALSE(odd_support_check(Vec::Ones(5), {0, 0, 0, 0, 0}).pass);
    EXPECT_FALSE(odd_support_check(odd_uniform_target(5), {0, 0.5, 0, 0, 0}).pass);
}

TEST(Setup, ClosedFormForTwoClones) {
    const CloneSetup s = make_clone_setup(symmetric_profile(2));
    EXPECT_EQ(s.k, 1);
    EXPECT_NEAR(s.w.offdiag[0], 1.0, 1e-15);
    EXPECT_NEAR(s.w_time, pi / std::sqrt(8.0), 1e-15);
    EXPECT_THROW(make_clone_setup(symmetric_profile(1)), InvalidInput);
}

TEST(Pipeline, TwoClonesMatchesBruteForceAndTarget) {
    const CloneSetup s = make_clone_setup(symmetric_profile(2));
    auto rng = sample_stream(4, 0);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Vector2cd psi = random_input(rng);
        const PipelineRun run = pipeline_run(s, psi);
        EXPECT_LE(run.max_stage_residual(), 1e-9);
        EXPECT_LE((run.state.to_dense() - brute_force_pipeline(s, psi)).norm(), 1e-9);
    }
}

TEST(Pipeline, ThreeClonesReport) {
    const CloneSetup s = make_clone_setup(symmetric_profile(3));
    const CloneReport c = clone_report(s, CloneMethod::compressed);
    const CloneReport b = clone_report(s, CloneMethod::brute_force);
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(c.fidelities[static_cast<std::size_t>(k)], 7.0 / 9.0, 1e-9);
        EXPECT_NEAR(b.fidelities[static_cast<std::size_t>(k)], 7.0 / 9.0, 1e-9);
    }
    // 5/6 on the Z eigenstates and 3/4 on the equator; the map is not covariant for N >= 3
    EXPECT_NEAR(c.spread, 1.0 / 12.0, 1e-9);
    EXPECT_LE(b.max_stage_residual, 1e-8);
}

TEST(Pipeline, AsymmetricThreeClones) {
    const CloneSetup s = make_clone_setup(make_profile({2, 1, 1}));
    const CloneReport r = clone_report(s, CloneMethod::compressed);
    EXPECT_NEAR(r.fidelities[0], 29.0 / 33.0, 1e-9);
    EXPECT_NEAR(r.fidelities[1], 47.0 / 66.0, 1e-9);
    EXPECT_NEAR(r.fidelities[2], 47.0 / 66.0, 1e-9);
}

TEST(Setup, DefaultOffsetAvoidsEvenSource) {
    EXPECT_EQ(make_clone_setup(symmetric_profile(3)).k, 2);
    EXPECT_EQ(make_clone_setup(symmetric_profile(4)).k, 0);
}

TEST(Setup, OddOffsetUnreachable) {
    EXPECT_THROW(make_clone_setup(symmetric_profile(3), 3), Infeasible);
}

TEST(Pipeline, OtherOffsets) {
    for (int k : {0, 2}) {
        const CloneSetup s = make_clone_setup(symmetric_profile(3), k);
        EXPECT_EQ(s.k, k);
        const CloneReport r = clone_report(s, CloneMethod::compressed);
        for (double f : r.fidelities) EXPECT_NEAR(f, 7.0 / 9.0, 1e-9) << k;
    }
}

TEST(Pipeline, WrongChainRaisesStageError) {
    CloneSetup s = make_clone_setup(symmetric_profile(3));
    for (double& j : s.w.offdiag) j *= 1.01;
    try {
        pipeline_run(s, design_inputs()[2]);
        FAIL() << "expected StageError";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "w-evolution");
        EXPECT_GT(e.residual(), 1e-8);
    }
    PipelineOptions loose;
    loose.strict = false;
    EXPECT_GT(pipeline_run(s, design_inputs()[2], loose).target_residual, 1e-8);
}

TEST(Pipeline, BadGhzChainRejected) {
    CloneSetup s = make_clone_setup(symmetric_profile(2));
    s.ghz.b[0] *= 1.05;
    EXPECT_THROW(pipeline_run(s, design_inputs()[0]), StageError);
}

TEST(Pipeline, BruteForceSizeLimit) {
    CloneSetup s;
    s.profile = symmetric_profile(8);
    s.ghz = standard_ising(15);
    s.w = RealSymTridiag::zero_diagonal(std::vector<double>(14, 1.0));
    s.w_time = 1.0;
    s.k = 7;
    EXPECT_THROW(brute_force_pipeline(s, design_inputs()[0]), InvalidInput);
}
