#include <gtest/gtest.h>

#include <random>

#include "mrltl/control/mic.hpp"

using namespace mrltl;

namespace {

// rho(0.5) = exp(-2) to 20 significant digits.
constexpr long double kExpMinus2 = 0.13533528323661269189L;

}  // namespace

TEST(Rho, Examples) {
    EXPECT_EQ(rho(-1.0), 0.0);
    EXPECT_EQ(rho(0.0), 0.0);
    EXPECT_NEAR(rho(1.0), 0.36787944117144233, 1e-15);
    EXPECT_NEAR(rho(0.5), static_cast<double>(kExpMinus2), 1e-12);
}

TEST(Rho, RightLimitIsZero) {
    EXPECT_LT(rho(1e-3), 1e-300);
    EXPECT_GE(rho(1e-3), 0.0);
}

TEST(Gate, BoundaryValues) {
    const double ds = 0.4, e = 0.3;
    for (double d : {0.0, 0.2, 0.4}) EXPECT_EQ(gate(d, ds, e), 0.0);
    for (double d : {0.7, 1.0, 5.0}) EXPECT_EQ(gate(d, ds, e), 1.0);
    EXPECT_NEAR(gate(ds + e / 2, ds, e), 0.5, 1e-9);
    EXPECT_EQ(gate(kInf, ds, e), 1.0);
}

TEST(Gate, NarrowBufferStaysFinite) {
    const double ds = 1e-6, e = 1e-6;
    for (int i = 1; i < 100; ++i) {
        const double g = gate(ds + e * i / 100.0, ds, e);
        ASSERT_TRUE(g >= 0.0 && g <= 1.0) << i;
    }
    EXPECT_NEAR(gate(ds + e / 2, ds, e), 0.5, 1e-9);
}

TEST(Gate, MatchesRhoRatio) {
    const double ds = 0.4, e = 0.3;
    for (int i = 1; i < 100; ++i) {
        const double d = ds + e * i / 100.0;
        const double a = rho(d - ds), b = rho(e + ds - d);
        EXPECT_NEAR(gate(d, ds, e), a / (a + b), 1e-14);
    }
}

TEST(Gate, MonotoneOnGrid) {
    double prev = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double g = gate(0.8 * i / 10000.0, 0.4, 0.3);
        EXPECT_GE(g, prev - 1e-15);
        prev = g;
    }
}

TEST(Kappa, LimitCases) {
    MicParams p;
    EXPECT_EQ(kappa({1.0, 1.0}, p), 1.0);
    p.g_mix = 0.0;
    EXPECT_EQ(kappa({5.0, 0.3}, p), 0.0);
    p.g_mix = 1.0;
    EXPECT_NEAR(kappa({p.d_s + p.eps / 2, 100.0}, p), 0.5, 1e-9);
    EXPECT_EQ(kappa({kInf, kInf}, MicParams{}), 1.0);
}

TEST(Kappa, InUnitIntervalOnRandomSweep) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> d(0.0, 2.0), g(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        MicParams p;
        p.g_mix = g(rng);
        const double k = kappa({d(rng), d(rng)}, p);
        ASSERT_GE(k, 0.0);
        ASSERT_LE(k, 1.0);
    }
}

TEST(Kappa, ContinuousInPosition) {
    // finite-difference modulus bounded by the numerically estimated
    // Lipschitz constant of the gate
    const MicParams p;
    double lip = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double a = 0.4 + 0.3 * i / 10000.0, b = a + 0.3 / 10000.0;
        lip = std::max(lip, std::abs(gate(b, p.d_s, p.eps) - gate(a, p.d_s, p.eps)) / (b - a));
    }
    const std::vector<Rect> rects{{2, 2, 3, 3}};
    const std::vector<Rect> traps{{0, 4, 1, 5}};
    const double h = 1e-3;
    for (double x = 0.0; x < 5.0; x += 0.05)
        for (double y = 0.0; y < 6.0; y += 0.05) {
            const double k1 = kappa(mic_distances({x, y}, rects, {}, traps), p);
            const double k2 = kappa(mic_distances({x + h, y}, rects, {}, traps), p);
            ASSERT_LE(std::abs(k1 - k2), 1.01 * lip * h + 1e-12);
        }
}

TEST(Mix, Examples) {
    const InputBounds b;
    EXPECT_EQ(mix({0.5, -0.1}, std::nullopt, 1.0, b), (ControlInput{0.35, -0.1}));
    EXPECT_EQ(mix({0.1, 0.1}, HumanInput{0, 0.3, 0.3, 0}, 0.0, b), (ControlInput{0.1, 0.1}));
    const auto u = mix({0.2, 0}, HumanInput{0, 0.3, 0, 0}, 1.0, b);
    EXPECT_NEAR(u.v, 0.35, 1e-15);
    EXPECT_EQ(u.w, 0.0);
    EXPECT_THROW(mix({0, 0}, std::nullopt, 1.5, b), std::invalid_argument);
}

TEST(Mix, StaleHumanInputIgnored) {
    const InputBounds b;
    const HumanInput h{0, 0.1, 0, 1.0};
    EXPECT_NEAR(mix({0, 0}, h, 1.0, b, 1.4, 0.5).v, 0.1, 1e-15);
    EXPECT_EQ(mix({0, 0}, h, 1.0, b, 1.6, 0.5).v, 0.0);
}

TEST(MicDistances, EmptySetsAreInfinite) {
    const auto d = mic_distances({1, 1}, {}, {}, {});
    EXPECT_EQ(d.to_obstacles, kInf);
    EXPECT_EQ(d.to_traps, kInf);
    const auto e = mic_distances({1, 1}, {{2, 0, 3, 3}}, {{{1, 1.5}, 0.2}}, {});
    EXPECT_NEAR(e.to_obstacles, 0.3, 1e-15);
}
