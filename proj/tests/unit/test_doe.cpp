#include <cmath>

#include <gtest/gtest.h>

#include "xferbo/doe.hpp"
#include "xferbo/errors.hpp"

using namespace xferbo;

namespace {
std::vector<VariableMeta> box3() { return {{"a", -1.0, 1.0}, {"b", 0.0, 10.0}, {"c", 5.0, 6.0}}; }
} // namespace

TEST(Lhs, OnePointPerStratumInEveryColumn) {
    const auto vars = box3();
    for (std::size_t n : {1u, 2u, 7u, 50u}) {
        const auto x = lhs_sample(vars, n, 42 + n);
        ASSERT_EQ(x.rows(), static_cast<Eigen::Index>(n));
        for (std::size_t d = 0; d < vars.size(); ++d) {
            std::vector<int> hits(n, 0);
            for (std::size_t i = 0; i < n; ++i) {
                const double u = (x(i, d) - vars[d].lower) / vars[d].width();
                ASSERT_GE(u, 0.0);
                ASSERT_LT(u, 1.0);
                ++hits[static_cast<std::size_t>(std::floor(u * n))];
            }
            for (int h : hits) EXPECT_EQ(h, 1);
        }
    }
}

TEST(Lhs, DeterministicPerSeed) {
    const auto vars = box3();
    EXPECT_EQ(lhs_sample(vars, 10, 1), lhs_sample(vars, 10, 1));
    EXPECT_NE(lhs_sample(vars, 10, 1), lhs_sample(vars, 10, 2));
}

TEST(Lhs, ZeroCountIsRejected) { EXPECT_THROW(lhs_sample(box3(), 0, 1), std::invalid_argument); }

TEST(Uniform, WithinBounds) {
    const auto vars = box3();
    const auto x = uniform_sample(vars, 500, 3);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (std::size_t d = 0; d < 3; ++d) {
            EXPECT_GE(x(i, d), vars[d].lower);
            EXPECT_LE(x(i, d), vars[d].upper);
        }
}

TEST(Sampling, ParsesNames) {
    EXPECT_EQ(parse_sampling("lhs"), SamplingScheme::lhs);
    EXPECT_EQ(parse_sampling("uniform"), SamplingScheme::uniform);
    EXPECT_THROW(parse_sampling("sobol"), ConfigError);
}

TEST(Variables, Validation) {
    EXPECT_THROW(validate_variables(std::vector<VariableMeta>{{"x", 1.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(validate_variables(std::vector<VariableMeta>{{"x", 0.0, 1.0}, {"X", 0.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(validate_variables(std::vector<VariableMeta>{{"", 0.0, 1.0}}), std::invalid_argument);
    EXPECT_NO_THROW(validate_variables(box3()));
}

TEST(Names, CaseInsensitive) {
    EXPECT_TRUE(names_match("Wing_Span", "wing_span"));
    EXPECT_FALSE(names_match("span", "spans"));
}

TEST(Category, RoundTrip) {
    for (auto c : {ConstraintCategory::performance, ConstraintCategory::volumetric_integration,
                   ConstraintCategory::operational, ConstraintCategory::environmental, ConstraintCategory::other})
        EXPECT_EQ(parse_category(to_string(c)), c);
    EXPECT_THROW(parse_category("aero"), ConfigError);
}

TEST(Doe, RejectsShapeMismatchAndOutOfBounds) {
    const std::vector<VariableMeta> v = {{"x", 0.0, 1.0}};
    EXPECT_THROW(Doe(v, Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2)), std::invalid_argument);
    EXPECT_THROW(Doe(v, Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Zero(1)), std::invalid_argument);
    EXPECT_THROW(Doe(v, Eigen::MatrixXd::Zero(0, 1), Eigen::VectorXd::Zero(0)), std::invalid_argument);
    EXPECT_THROW(Doe(v, Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(2),
                     {{{"c", ConstraintCategory::other}, Eigen::VectorXd::Zero(3)}}),
                 std::invalid_argument);
}

TEST(Doe, FeasibilityAndAppend) {
    const std::vector<VariableMeta> v = {{"x", 0.0, 1.0}};
    Eigen::MatrixXd x(2, 1);
    x << 0.1, 0.9;
    Eigen::VectorXd c(2);
    c << -1.0, 0.5;
    const Doe d(v, x, Eigen::Vector2d(1.0, 2.0), {{{"c", ConstraintCategory::other}, c}});
    EXPECT_TRUE(d.feasible(0));
    EXPECT_FALSE(d.feasible(1));
    const double cv[] = {0.0};
    const Doe e = d.append(Eigen::VectorXd::Constant(1, 0.5), 3.0, cv);
    EXPECT_EQ(e.size(), 3u);
    EXPECT_EQ(d.size(), 2u);
    EXPECT_TRUE(e.feasible(2));  // boundary value 0 counts as feasible
    EXPECT_DOUBLE_EQ(e.objective()(2), 3.0);
}

TEST(EvaluateDoe, ReportsTheFailingRow) {
    const std::vector<VariableMeta> v = {{"x", 0.0, 1.0}};
    auto spec = ProblemSpec::from_functions("f", v, [](const Eigen::VectorXd& x) {
        if (x(0) > 0.5) throw std::runtime_error("boom");
        return x(0);
    });
    Eigen::MatrixXd pts(3, 1);
    pts << 0.1, 0.2, 0.7;
    try {
        evaluate_doe(spec, pts);
        FAIL();
    } catch (const EvaluationError& e) {
        EXPECT_EQ(e.row(), 2u);
        EXPECT_EQ(e.cause(), "boom");
    }
}

TEST(ProblemSpec, FromFunctionsEvaluatesConstraintsInOrder) {
    const std::vector<VariableMeta> v = {{"x", 0.0, 1.0}};
    auto spec = ProblemSpec::from_functions(
        "f", v, [](const Eigen::VectorXd& x) { return x(0); },
        {{{"c1", ConstraintCategory::other}, [](const Eigen::VectorXd& x) { return x(0) - 1; }},
         {{"c2", ConstraintCategory::other}, [](const Eigen::VectorXd& x) { return 2 * x(0); }}});
    const auto e = spec.evaluate(Eigen::VectorXd::Constant(1, 0.25));
    EXPECT_DOUBLE_EQ(e.objective, 0.25);
    ASSERT_EQ(e.constraints.size(), 2u);
    EXPECT_DOUBLE_EQ(e.constraints[0], -0.75);
    EXPECT_DOUBLE_EQ(e.constraints[1], 0.5);
}
