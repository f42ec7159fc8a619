#include <spinforge/isoflow.hpp>

#include <gtest/gtest.h>

using namespace spinforge;

TEST(Seeds, SingularValuesAreOddIntegers) {
    for (int n : {2, 5, 21}) {
        EXPECT_LE(sv_drift(gamma0_seed(n)), 1e-9) << n;
        EXPECT_LE(sv_drift(gamma1_seed(n)), 1e-9) << n;
        EXPECT_LE(gamma0_seed(n).structure_residual(), 1e-15);
        EXPECT_LE(gamma1_seed(n).structure_residual(), 1e-15);
    }
}

TEST(Seeds, ValidationRejectsWrongSpectrum) {
    StructuredX x = gamma0_seed(4);
    x.x *= 0.5;
    EXPECT_THROW(validate_seed(x), InvalidInput);
}

TEST(GammaConstraints, SquareSystem) {
    for (int n : {2, 3, 6, 9}) {
        const LinearConstraintSet c = gamma_constraints(gamma0_seed(n));
        EXPECT_EQ(c.rows(), c.params()) << n;
        EXPECT_EQ(c.params(), gamma_parameter_count(n));
    }
}

TEST(GammaConstraints, TwoByTwoUniqueDirection) {
    const LinearConstraintSet c = gamma_constraints(gamma0_seed(2));
    const SubspaceSplit s = split_constraints(c);
    EXPECT_EQ(s.kernel.cols(), 0);
    EXPECT_LE(s.residual, 1e-12);
}

TEST(GammaConstraints, StructureRowsVanishOnValidPoint) {
    const LinearConstraintSet c = gamma_constraints(gamma1_seed(5));
    for (Eigen::Index r = 0; r + 1 < c.rows(); ++r) EXPECT_EQ(c.b(r), 0.0) << c.row_labels[static_cast<std::size_t>(r)];
    EXPECT_EQ(c.b(c.rows() - 1), 1.0);
}

TEST(GammaConstraints, CentroViolationScalesLinearly) {
    auto max_rhs = [](double eps) {
        StructuredX x = gamma0_seed(5);
        x.x(0, 0) += eps;
        const LinearConstraintSet c = gamma_constraints(x);
        double m = 0.0;
        for (Eigen::Index r = 0; r < c.rows(); ++r)
            if (c.row_labels[static_cast<std::size_t>(r)] == "centrosymmetric") m = std::max(m, std::abs(c.b(r)));
        return m;
    };
    EXPECT_NEAR(max_rhs(1e-6), 1e-6, 1e-12);
    EXPECT_NEAR(max_rhs(2e-6) / max_rhs(1e-6), 2.0, 1e-6);
}

TEST(FlowStep, ZeroGeneratorsLeaveXUnchanged) {
    const StructuredX x = gamma0_seed(6);
    const FlowGenerators g{Mat::Zero(6, 6), Mat::Zero(6, 6), 0.0};
    EXPECT_EQ((flow_step_direct(x, g, 0.3).x - x.x).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((flow_step_unitary(x, g, 0.3).x - x.x).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FlowStep, DirectStepSmallDrift) {
    const StructuredX x = gamma0_seed(8);
    const double d = 1e-4;
    const StructuredX y = flow_step_direct(x, solve_generators(x, d, 1.0), d);
    EXPECT_LE(sv_drift(y), 1e-7);
    EXPECT_LE(y.structure_residual(), 1e-12);
    EXPECT_NEAR(y.gamma, d, 1e-15);
}

TEST(FlowStep, DirectStepRichardson) {
    const StructuredX x = gamma0_seed(6);
    auto after = [&](double d, int k) {
        StructuredX y = x;
        for (int i = 0; i < k; ++i) y = flow_step_direct(y, solve_generators(y, d, 1.0), d);
        return y;
    };
    const double e1 = (after(1e-3, 1).x - after(5e-4, 2).x).cwiseAbs().maxCoeff();
    const double e2 = (after(5e-4, 1).x - after(2.5e-4, 2).x).cwiseAbs().maxCoeff();
    EXPECT_NEAR(e1 / e2, 4.0, 0.5);
}

TEST(FlowStep, UnitaryStepPreservesSingularValues) {
    const StructuredX x = gamma0_seed(7);
    const double d = 1e-2;
    const StructuredX y = flow_step_unitary(x, solve_generators(x, d, 1.0), d);
    EXPECT_LE(sv_drift(y), 1e-10);
    EXPECT_LE(y.structure_residual(), 1e-3);
}

TEST(Interpolate, SameEndpointReturnsSeed) {
    const InterpolationResult r = interpolate_gamma(5, 0.0, 0.0, FlowMode::unitary, 0.05);
    EXPECT_EQ((r.x.x - gamma0_seed(5).x).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Interpolate, UnknownSeedRejected) {
    EXPECT_THROW(interpolate_gamma(5, 0.3, 0.5, FlowMode::unitary, 0.05), InvalidInput);
}

TEST(Interpolate, UnitaryZeroToOneMatchesIsing) {
    const InterpolationResult r = interpolate_gamma(6, 0.0, 1.0, FlowMode::unitary, 0.02);
    EXPECT_NEAR(r.x.gamma, 1.0, 1e-12);
    EXPECT_LE(r.sv_drift, 1e-8);
    EXPECT_LE(r.x.ratio_residual(), 1e-6);
    EXPECT_LE(r.x.centro_residual(), 1e-6);
    const std::vector<double> a = r.x.singular_values(), b = gamma1_seed(6).singular_values();
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-5);
    for (const auto& row : r.trace) {
        EXPECT_GE(row.sv_drift, 0.0);
        EXPECT_LE(row.structure_residual, 0.1 * 0.02);
    }
    EXPECT_LE(r.trace.back().structure_residual, 1e-10);
}

TEST(Interpolate, DirectModeWithinEulerBound) {
    const double step = 0.01;
    const InterpolationResult r = interpolate_gamma(5, 0.0, 0.5, FlowMode::direct, step);
    EXPECT_NEAR(r.x.gamma, 0.5, 1e-12);
    EXPECT_LE(r.sv_drift, 10 * step);
    EXPECT_LE(r.structure_residual, 1e-6);
}

TEST(Interpolate, DownwardFromIsing) {
    const InterpolationResult r = interpolate_gamma(4, 1.0, 0.6, FlowMode::unitary, 0.02);
    EXPECT_NEAR(r.x.gamma, 0.6, 1e-12);
    EXPECT_LE(r.sv_drift, 1e-8);
}

TEST(ZyHamiltonian, GhzFromInterpolatedChain) {
    const InterpolationResult r = interpolate_gamma(6, 0.0, 0.5, FlowMode::unitary, 0.02);
    const CVec out = evolve(zy_hamiltonian(r.x), ghz_time(), basis_state(6, 0));
    EXPECT_GE(std::abs(ghz_target(6).dot(out)), 0.999);
}

TEST(ZyHamiltonian, IsingLimitAgrees) {
    const IsingChain c = standard_ising(4);
    const CVec psi = basis_state(4, 3);
    const CVec a = evolve(zy_hamiltonian(gamma1_seed(4)), 0.4, psi);
    const CVec b = brute_force_evolve(c, 0.4, psi);
    EXPECT_LE((a - b).norm(), 1e-12);
}
