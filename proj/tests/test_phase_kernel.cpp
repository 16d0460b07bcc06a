#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pi2aan/phase_kernel.hpp"

using namespace pi2aan;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(KernelCenters, SingleKernelSitsAtPi) {
    const auto c = kernel_centers(1);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_NEAR(c[0], kPi, 1e-15);
}

TEST(KernelCenters, TwoKernels) {
    const auto c = kernel_centers(2);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(c[0], kPi / 2, 1e-15);
    EXPECT_NEAR(c[1], 3 * kPi / 2, 1e-15);
}

TEST(KernelCenters, TenKernelsFirstCenter) {
    EXPECT_NEAR(kernel_centers(10)[0], 0.314159, 1e-6);
}

TEST(KernelCenters, RejectsEmpty) { EXPECT_THROW(kernel_centers(0), ConfigError); }

TEST(BasisEval, PeakAtOwnCenter) {
    const BasisSet basis;
    const auto& c = basis.grid().kernel_phases;
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(basis.eval(c[i])[static_cast<Eigen::Index>(i)], 1.0);
}

TEST(BasisEval, OneRadianAway) {
    const BasisSet basis(5.0, PhaseGrid(1, 1));
    EXPECT_NEAR(basis.eval(kPi + 1.0)[0], std::exp(-2.5), 1e-12);
    EXPECT_NEAR(basis.eval(kPi + 1.0)[0], 0.0820849986, 1e-9);
}

TEST(BasisEval, VanishingWidthIsFlat) {
    const BasisSet basis(1e-12, PhaseGrid(10, 10));
    const auto psi = basis.eval(0.01);
    for (Eigen::Index i = 0; i < psi.size(); ++i) EXPECT_NEAR(psi[i], 1.0, 1e-9);
}

TEST(Landscape, ConstantWeights) {
    const BasisSet basis;
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(10, 0.3);
    EXPECT_NEAR(landscape_eval(w, 10.0, 2.0, basis).raw, 0.3, 1e-12);
    EXPECT_EQ(landscape_eval(Eigen::VectorXd::Zero(10), 10.0, 2.0, basis).raw, 0.0);
}

TEST(Landscape, NarrowKernelsPickOwnWeight) {
    const BasisSet basis(5.0, PhaseGrid(2, 10));
    const Eigen::VectorXd w = Eigen::Vector2d(1.0, 0.0);
    const double far = std::exp(-2.5 * kPi * kPi);
    const double g = landscape_eval(w, 10.0, kPi / 2, basis).raw;
    EXPECT_NEAR(g, 1.0 / (1.0 + far), 1e-15);
    EXPECT_NEAR(g, 1.0, 1e-10);
}

TEST(Landscape, SizeMismatchThrows) {
    const BasisSet basis;
    EXPECT_THROW(landscape_eval(Eigen::VectorXd::Zero(3), 10.0, 1.0, basis), ShapeError);
}

TEST(Landscape, ClampOnlyAtActuation) {
    const BasisSet basis;
    const auto hi = landscape_eval(Eigen::VectorXd::Constant(10, 25.0), 10.0, 1.0, basis);
    EXPECT_NEAR(hi.raw, 25.0, 1e-9);
    EXPECT_EQ(hi.clamped, 10.0);
    const auto lo = landscape_eval(Eigen::VectorXd::Constant(10, -2.0), 10.0, 1.0, basis);
    EXPECT_NEAR(lo.raw, -2.0, 1e-12);
    EXPECT_EQ(lo.clamped, 0.0);
}

TEST(Segments, Examples) {
    EXPECT_EQ(segment_of(0.01, 10), 1);
    EXPECT_EQ(segment_of(kTwoPi - 1e-9, 10), 10);
    EXPECT_EQ(segment_of(kPi, 10), 6);
    EXPECT_THROW(segment_of(-0.1, 10), DomainError);
    EXPECT_THROW(segment_of(kTwoPi, 10), DomainError);
}

TEST(Properties, ConstantLandscapeIsExact) {
    const BasisSet basis;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> value(-20.0, 20.0);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (int t = 0; t < 1000; ++t) {
        const double c = value(rng);
        const Eigen::VectorXd w = Eigen::VectorXd::Constant(10, c);
        EXPECT_NEAR(landscape_eval(w, 10.0, phase(rng), basis).raw, c, 1e-9);
    }
}

TEST(Properties, LipschitzContinuity) {
    // |dg/dphi| <= 4 pi mu max|w| because |phi - phi_i| <= 2 pi on the linear axis.
    const BasisSet basis;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi - 1e-3);
    for (int t = 0; t < 200; ++t) {
        Eigen::VectorXd w(10);
        for (auto& v : w) v = value(rng);
        const double L = 4.0 * kPi * basis.mu() * w.cwiseAbs().maxCoeff();
        const double phi = phase(rng);
        const double d = 1e-4;
        const double dg = std::abs(landscape_eval(w, 10.0, phi + d, basis).raw - landscape_eval(w, 10.0, phi, basis).raw);
        EXPECT_LE(dg, L * d * (1.0 + 1e-9));
    }
}

TEST(Properties, NoJumpAtSegmentBoundaries) {
    const BasisSet basis;
    Eigen::VectorXd w(10);
    w << 0.1, 2.0, -1.0, 0.5, 3.0, 0.0, 1.5, 4.0, -0.5, 2.5;
    const double L = 4.0 * kPi * basis.mu() * w.cwiseAbs().maxCoeff();
    for (int n = 1; n < 10; ++n) {
        const double b = n * kTwoPi / 10;
        const double eps = 1e-9;
        EXPECT_LE(std::abs(landscape_eval(w, 10.0, b + eps, basis).raw - landscape_eval(w, 10.0, b - eps, basis).raw),
                  L * 2 * eps + 1e-12);
    }
}

TEST(Properties, Ranges) {
    const BasisSet basis;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> value(-50.0, 50.0);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (int t = 0; t < 500; ++t) {
        Eigen::VectorXd w(10);
        for (auto& v : w) v = value(rng);
        const double phi = phase(rng);
        const auto psi = basis.eval(phi);
        EXPECT_GT(psi.minCoeff(), 0.0);
        EXPECT_LE(psi.maxCoeff(), 1.0);
        const auto g = landscape_eval(w, 10.0, phi, basis);
        EXPECT_GE(g.clamped, 0.0);
        EXPECT_LE(g.clamped, 10.0);
        EXPECT_GE(g.raw, w.minCoeff() - 1e-9);
        EXPECT_LE(g.raw, w.maxCoeff() + 1e-9);
    }
}

TEST(Properties, SegmentsPartitionTheStride) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (int N : {1, 3, 10, 17}) {
        const double width = kTwoPi / N;
        for (int t = 0; t < 300; ++t) {
            const double phi = phase(rng);
            const int n = segment_of(phi, N);
            ASSERT_GE(n, 1);
            ASSERT_LE(n, N);
            EXPECT_LE((n - 1) * width, phi * (1 + 1e-15));
            EXPECT_LT(phi, n * width * (1 + 1e-15));
        }
        for (int n = 1; n <= N; ++n) EXPECT_EQ(segment_of((n - 0.5) * width, N), n);
    }
}

TEST(Policy, RejectsBadClamp) {
    EXPECT_THROW(ImpedancePolicy(Eigen::VectorXd::Zero(3), 0.0), ConfigError);
}
