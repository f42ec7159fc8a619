#include <spinforge/pst.hpp>

#include <gtest/gtest.h>

using namespace spinforge;

TEST(StandardCouplings, SmallChains) {
    const PstChain c2 = standard_couplings(2);
    ASSERT_EQ(c2.couplings.size(), 1u);
    EXPECT_DOUBLE_EQ(c2.couplings[0], 1.0);
    EXPECT_DOUBLE_EQ(c2.transfer_time, pi / 2);

    const PstChain c3 = standard_couplings(3);
    EXPECT_NEAR(c3.couplings[0], std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(c3.couplings[1], std::sqrt(2.0), 1e-15);

    const PstChain c4 = standard_couplings(4);
    EXPECT_NEAR(c4.couplings[0], std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(c4.couplings[1], 2.0, 1e-15);
    EXPECT_NEAR(c4.couplings[2], std::sqrt(3.0), 1e-15);
}

TEST(StandardCouplings, RejectsTooShort) {
    EXPECT_THROW(standard_couplings(1), InvalidInput);
    EXPECT_THROW(standard_couplings(0), InvalidInput);
}

TEST(VerifyMirror, StandardChains) {
    EXPECT_LE(verify_mirror(standard_couplings(2)), 1e-12);
    EXPECT_LE(verify_mirror(standard_couplings(21)), 1e-9);
    for (int n = 2; n <= 64; ++n) EXPECT_LE(verify_mirror(standard_couplings(n)), 1e-9) << n;
}

TEST(VerifyMirror, UniformChainDoesNotTransfer) {
    PstChain c;
    c.n = 4;
    c.couplings = {1, 1, 1};
    EXPECT_GT(verify_mirror(c), 0.1);
}

TEST(VerifyMirror, ScalingRescalesTime) {
    PstChain c = standard_couplings(9);
    for (double& j : c.couplings) j *= 2.5;
    c.transfer_time /= 2.5;
    EXPECT_LE(verify_mirror(c), 1e-9);
    const EigenSystem es = eig_sym_tridiag(c.matrix());
    for (int k = 0; k < 9; ++k) EXPECT_NEAR(es.spectrum.values[static_cast<std::size_t>(k)], 2.5 * (2 * k - 8), 1e-9);
}

TEST(StandardSpectrum, UnitSpacingTwo) {
    for (int n : {2, 5, 12, 33}) {
        const EigenSystem es = eig_sym_tridiag(standard_couplings(n).matrix());
        for (int k = 0; k < n; ++k)
            EXPECT_NEAR(es.spectrum.values[static_cast<std::size_t>(k)], -(n - 1) + 2.0 * k, 1e-9) << n;
    }
}

TEST(MinGapBound, Examples) {
    EXPECT_DOUBLE_EQ(min_gap_bound(Spectrum({-1, 1})), pi / 2);
    EXPECT_DOUBLE_EQ(min_gap_bound(Spectrum({-5, -3, -1, 1, 3, 5})), pi / 2);
    EXPECT_DOUBLE_EQ(min_gap_bound(Spectrum({0, 3, 5})), pi / 2);
}

TEST(MinGapBound, DegenerateRejected) {
    EXPECT_THROW(min_gap_bound(Spectrum({2, 2, 2})), InvalidInput);
    EXPECT_THROW(min_gap_bound(Spectrum({1})), InvalidInput);
}

TEST(PstChain, ValidateRejectsNonPositive) {
    PstChain c;
    c.n = 3;
    c.couplings = {1, -1};
    EXPECT_THROW(c.validate(), InvalidInput);
    c.couplings = {1};
    EXPECT_THROW(c.validate(), InvalidInput);
}
