#include <gtest/gtest.h>

#include <random>

#include "mrltl/sim/dynamics.hpp"
#include "support/euler.hpp"

using namespace mrltl;

TEST(StepUnicycle, StraightLine) {
    const auto s = step_unicycle({0, 0, 0}, {0.35, 0}, 1.0);
    EXPECT_NEAR(s.x, 0.35, 1e-15);
    EXPECT_NEAR(s.y, 0.0, 1e-15);
    EXPECT_NEAR(s.theta, 0.0, 1e-15);
}

TEST(StepUnicycle, PureRotation) {
    const auto s = step_unicycle({0, 0, 0}, {0, 0.35}, 1.0);
    EXPECT_NEAR(s.x, 0.0, 1e-15);
    EXPECT_NEAR(s.y, 0.0, 1e-15);
    EXPECT_NEAR(s.theta, 0.35, 1e-15);
}

TEST(StepUnicycle, QuarterCircle) {
    // radius v / w = 1 m, quarter turn ends at (1, 1) heading +pi/2
    const double w = 0.25;
    const auto s = step_unicycle({0, 0, 0}, {w, w}, (std::numbers::pi / 2) / w);
    EXPECT_NEAR(s.x, 1.0, 1e-12);
    EXPECT_NEAR(s.y, 1.0, 1e-12);
    EXPECT_NEAR(s.theta, std::numbers::pi / 2, 1e-12);
}

TEST(StepUnicycle, HeadingWrapped) {
    const auto s = step_unicycle({0, 0, 3.1}, {0, 0.35}, 1.0);
    EXPECT_GT(s.theta, -std::numbers::pi);
    EXPECT_LE(s.theta, std::numbers::pi);
    EXPECT_NEAR(s.theta, 3.45 - 2 * std::numbers::pi, 1e-12);
}

TEST(StepUnicycle, RejectsBadArguments) {
    EXPECT_THROW(step_unicycle({0, 0, 0}, {0.1, 0}, 0.0), std::invalid_argument);
    EXPECT_THROW(step_unicycle({0, 0, 0}, {0.4, 0}, 0.1, InputBounds{}), InputOutOfBounds);
    EXPECT_NO_THROW(step_unicycle({0, 0, 0}, {-0.35, 0.35}, 0.1, InputBounds{}));
}

TEST(StepUnicycle, TinyTurnRateContinuous) {
    const auto a = step_unicycle({1, 2, 0.3}, {0.3, 1e-10}, 1.0);
    const auto b = step_unicycle({1, 2, 0.3}, {0.3, 2e-9}, 1.0);
    EXPECT_NEAR(a.x, b.x, 1e-9);
    EXPECT_NEAR(a.y, b.y, 1e-9);
}

TEST(StepUnicycle, MatchesEulerOracle) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> pos(-5, 5), ang(-std::numbers::pi, std::numbers::pi),
        v(-0.35, 0.35), w(-0.35, 0.35), dt(0.01, 1.0);
    for (int i = 0; i < 200; ++i) {
        const RobotState s{pos(rng), pos(rng), ang(rng)};
        const ControlInput u{v(rng), w(rng)};
        const double h = dt(rng);
        const auto exact = step_unicycle(s, u, h);
        const auto ref = oracle::euler(s, u, h, 10000);
        EXPECT_NEAR(exact.x, ref.x, 1e-6);
        EXPECT_NEAR(exact.y, ref.y, 1e-6);
        EXPECT_NEAR(wrap_angle(exact.theta - ref.theta), 0.0, 1e-6);
    }
}
