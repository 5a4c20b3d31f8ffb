#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "xferbo/gp.hpp"
#include "xferbo/kpls.hpp"
#include "xferbo/random.hpp"

using namespace xferbo;

namespace {

GpConfig quick(std::uint64_t seed) {
    GpConfig c;
    c.seed = seed;
    c.n_starts = 3;
    return c;
}

} // namespace

TEST(Pls, FirstDirectionMaximizesCovarianceByAngleScan) {
    Rng rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 30;
        Eigen::MatrixXd x(n, 2);
        Eigen::VectorXd y(n);
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        for (int i = 0; i < n; ++i) {
            x(i, 0) = rng.uniform();
            x(i, 1) = rng.uniform();
            y(i) = a * x(i, 0) + b * x(i, 1) + 0.3 * std::sin(7 * x(i, 0));
        }
        const auto pls = pls_weights(x, y, 1);
        ASSERT_EQ(pls.weights.rows(), 1);
        // brute force: direction maximizing |cov(X w, y)| over the unit circle
        const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
        const Eigen::VectorXd yc = (y.array() - y.mean()).matrix();
        double best = -1, best_angle = 0;
        const int steps = 200000;
        for (int s = 0; s < steps; ++s) {
            const double t = std::numbers::pi * s / steps;
            const double c = std::abs((xc * Eigen::Vector2d(std::cos(t), std::sin(t))).dot(yc));
            if (c > best) {
                best = c;
                best_angle = t;
            }
        }
        const Eigen::Vector2d oracle(std::cos(best_angle), std::sin(best_angle));
        EXPECT_NEAR(std::abs(oracle.dot(pls.weights.row(0).transpose())), 1.0, 1e-8);
    }
}

TEST(Pls, RowsAreUnitAndMaskedColumnsZero) {
    const std::vector<VariableMeta> vars = {{"a", 0, 1}, {"b", 0, 1}, {"c", 0, 1}, {"d", 0, 1}};
    const auto x = lhs_sample(vars, 25, 2);
    Eigen::VectorXd y(25);
    for (int i = 0; i < 25; ++i) y(i) = x(i, 0) * x(i, 0) + 2 * x(i, 2) - x(i, 3);
    const auto pls = pls_weights(x, y, 0, {false, true, false, false});
    ASSERT_EQ(pls.weights.rows(), 3);  // min(4, unmasked)
    for (Eigen::Index l = 0; l < pls.weights.rows(); ++l) {
        EXPECT_NEAR(pls.weights.row(l).norm(), 1.0, 1e-12);
        EXPECT_EQ(pls.weights(l, 1), 0.0);
    }
}

TEST(Pls, ConstantOutputIsDegenerate) {
    const std::vector<VariableMeta> vars = {{"a", 0, 1}, {"b", 0, 1}};
    const auto pls = pls_weights(lhs_sample(vars, 10, 3), Eigen::VectorXd::Constant(10, 2.0), 0);
    EXPECT_TRUE(pls.degenerate);
    ASSERT_EQ(pls.weights.rows(), 1);
    EXPECT_NEAR(pls.weights(0, 0), std::sqrt(0.5), 1e-15);
}

TEST(Pls, EverythingMaskedIsRejected) {
    EXPECT_THROW(pls_weights(Eigen::MatrixXd::Zero(3, 1), Eigen::Vector3d(1, 2, 3), 0, {true}), std::invalid_argument);
}

TEST(Kpls, MaskedModelEqualsOneDimensionalModel) {
    // a 2-D source where x2 is absent (filled by the midpoint) against the same data in 1-D
    const std::vector<VariableMeta> one = {{"x1", -1.0, 2.0}};
    const std::vector<VariableMeta> two = {{"x1", -1.0, 2.0}, {"x2", 0.0, 4.0}};
    const auto x1 = lhs_sample(one, 12, 4);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y(i) = std::sin(2 * x1(i, 0)) + x1(i, 0);
    Eigen::MatrixXd x2(12, 2);
    x2.col(0) = x1.col(0);
    x2.col(1).setConstant(2.0);
    const auto a = train_gp(x1, y, one, KernelKind::kpls, quick(5));
    const auto b = train_gp(x2, y, two, KernelKind::kpls, quick(5), {false, true});
    Rng rng(6);
    for (int i = 0; i < 50; ++i) {
        const double u = rng.uniform(-1.0, 2.0);
        const auto pa = a.predict(Eigen::VectorXd::Constant(1, u));
        const auto pb = b.predict(Eigen::Vector2d(u, rng.uniform(0.0, 4.0)));
        EXPECT_NEAR(pa.mean, pb.mean, 1e-8);
        EXPECT_NEAR(pa.sd, pb.sd, 1e-8);
    }
}

TEST(Kpls, MaskedCoordinateIsBitwiseIrrelevant) {
    const std::vector<VariableMeta> vars = {{"x1", 0, 1}, {"x2", 0, 1}, {"x3", 0, 1}};
    auto x = lhs_sample(vars, 15, 7);
    x.col(1).setConstant(0.5);
    Eigen::VectorXd y(15);
    for (int i = 0; i < 15; ++i) y(i) = x(i, 0) - 3 * x(i, 2) * x(i, 2);
    const auto gp = train_gp(x, y, vars, KernelKind::kpls, quick(8), {false, true, false});
    const auto base = gp.predict(Eigen::Vector3d(0.3, 0.5, 0.6));
    for (double v : {-100.0, 0.0, 0.123, 1e6}) {
        const auto p = gp.predict(Eigen::Vector3d(0.3, v, 0.6));
        EXPECT_EQ(p.mean, base.mean);
        EXPECT_EQ(p.sd, base.sd);
    }
}

TEST(Kpls, ComponentCountMinimizesLooError) {
    const std::vector<VariableMeta> vars = {{"a", 0, 1}, {"b", 0, 1}, {"c", 0, 1}};
    const auto x = lhs_sample(vars, 20, 9);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) y(i) = std::exp(x(i, 0)) + x(i, 1) * x(i, 2);
    const auto fit = fit_kpls_weights(x, y, vars, 0, quick(10));
    ASSERT_EQ(fit.loo_errors.size(), 3u);
    const auto best = std::min_element(fit.loo_errors.begin(), fit.loo_errors.end()) - fit.loo_errors.begin();
    EXPECT_EQ(fit.n_components, best + 1);
    EXPECT_EQ(fit.weights.rows(), fit.n_components);
}

TEST(Kpls, NeedsThreePoints) {
    const std::vector<VariableMeta> vars = {{"a", 0, 1}};
    EXPECT_THROW(train_gp(Eigen::MatrixXd::Constant(2, 1, 0.5), Eigen::Vector2d(1, 2), vars, KernelKind::kpls, quick(1)),
                 std::invalid_argument);
}
