#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_surrogates.hpp"
#include "xferbo/acquisition.hpp"

using namespace xferbo;

TEST(ExpectedImprovement, MatchesMonteCarlo) {
    const double cases[][3] = {{0.0, 1.0, 0.5}, {1.0, 0.3, 0.2}, {-2.0, 2.0, -1.0}, {0.5, 0.05, 0.6}};
    std::uint64_t seed = 1;
    for (const auto& c : cases) {
        const double ei = expected_improvement(c[0], c[1], c[2]);
        const double mc = oracle::monte_carlo_ei(c[0], c[1], c[2], 400000, seed++);
        // improvement has sd below the predictive sd, so 5 standard errors is a loose bound
        EXPECT_NEAR(ei, mc, 5 * c[1] / std::sqrt(400000.0)) << c[0] << " " << c[1] << " " << c[2];
    }
}

TEST(ExpectedImprovement, ClosedFormAndLimits) {
    // sd = 1, mean = y_min: EI = phi(0)
    EXPECT_NEAR(expected_improvement(3.0, 1.0, 3.0), 1.0 / std::sqrt(2 * M_PI), 1e-15);
    EXPECT_EQ(expected_improvement(1.0, 0.0, 3.0), 2.0);
    EXPECT_EQ(expected_improvement(4.0, 0.0, 3.0), 0.0);
    EXPECT_EQ(expected_improvement(1.0, 1e-13, 3.0), 2.0);
    EXPECT_GE(expected_improvement(50.0, 1.0, 0.0), 0.0);
    EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
    EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
}

TEST(ExpectedImprovement, NonNegativeOnGrid) {
    for (double m = -5; m <= 5; m += 0.25)
        for (double s : {0.0, 1e-14, 1e-3, 0.5, 3.0}) EXPECT_GE(expected_improvement(m, s, 0.0), 0.0);
}

namespace {

const std::vector<VariableMeta> kBox = {{"x1", 0, 1}, {"x2", 0, 1}};

} // namespace

TEST(Acquisition, StaysFeasibleAndInBounds) {
    // EI is largest near (1,1); the constraint x1 + x2 <= 1 cuts it off
    FunctionSurrogate obj(2, [](const Eigen::VectorXd& x) { return -x(0) - x(1) + 0.1 * x(0) * x(0); },
                          [](const Eigen::VectorXd&) { return 0.05; });
    FunctionSurrogate con(2, [](const Eigen::VectorXd& x) { return x(0) + x(1) - 1.0; });
    const Surrogate* cons[] = {&con};
    AcquisitionConfig cfg;
    cfg.candidate_count = 500;
    const auto r = maximize_constrained(obj, cons, kBox, 0.0, cfg, 3);
    EXPECT_TRUE(r.surrogate_feasible);
    EXPECT_LE(r.x(0) + r.x(1), 1.0 + 1e-12);
    EXPECT_GE(r.x(0) + r.x(1), 0.97);
    for (int d = 0; d < 2; ++d) {
        EXPECT_GE(r.x(d), 0.0);
        EXPECT_LE(r.x(d), 1.0);
    }
    EXPECT_EQ(r.violation, 0.0);
}

TEST(Acquisition, FallsBackToLeastViolation) {
    FunctionSurrogate obj(2, [](const Eigen::VectorXd& x) { return x(0); });
    FunctionSurrogate con(2, [](const Eigen::VectorXd& x) { return 2.0 - x(0) - x(1); });
    const Surrogate* cons[] = {&con};
    AcquisitionConfig cfg;
    cfg.candidate_count = 200;
    const auto r = maximize_constrained(obj, cons, kBox, 1.0, cfg, 4);
    EXPECT_FALSE(r.surrogate_feasible);
    EXPECT_GT(r.violation, 0.0);
    EXPECT_LT(r.violation, 0.2);
}

TEST(Acquisition, DeterministicForSeed) {
    FunctionSurrogate obj(2, [](const Eigen::VectorXd& x) { return std::sin(5 * x(0)) + x(1); },
                          [](const Eigen::VectorXd& x) { return 0.1 + x(0); });
    AcquisitionConfig cfg;
    const auto a = maximize_constrained(obj, {}, kBox, 0.0, cfg, 9);
    const auto b = maximize_constrained(obj, {}, kBox, 0.0, cfg, 9);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.expected_improvement, b.expected_improvement);
}
