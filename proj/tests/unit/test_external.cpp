#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "xferbo/errors.hpp"
#include "xferbo/external_blackbox.hpp"

using namespace xferbo;

namespace {

ExternalDescriptor fixture(const std::string& mode, double timeout = 10.0) {
    ExternalDescriptor d;
    d.name = "py";
    d.command = {XFERBO_PYTHON, std::string(XFERBO_FIXTURE_DIR) + "/blackbox.py", mode};
    d.variables = {{"a", 0, 2}, {"b", 0, 2}};
    d.constraints = {{"c", ConstraintCategory::other}};
    d.timeout_seconds = timeout;
    return d;
}

} // namespace

TEST(External, EchoesSumAndKeepsChildAlive) {
    const auto spec = external_blackbox(fixture("echo"));
    for (int i = 0; i < 5; ++i) {
        const auto e = spec.evaluate(Eigen::Vector2d(0.25 * i, 1.0));
        EXPECT_DOUBLE_EQ(e.objective, 0.25 * i + 1.0);
        ASSERT_EQ(e.constraints.size(), 1u);
        EXPECT_DOUBLE_EQ(e.constraints[0], 0.25 * i - 1.0);
    }
}

TEST(External, MissingConstraintIsEvaluationError) {
    const auto spec = external_blackbox(fixture("missing"));
    EXPECT_THROW(spec.evaluate(Eigen::Vector2d(1, 1)), EvaluationError);
}

TEST(External, MalformedReplyIsEvaluationError) {
    const auto spec = external_blackbox(fixture("garbage"));
    EXPECT_THROW(spec.evaluate(Eigen::Vector2d(1, 1)), EvaluationError);
}

TEST(External, TimeoutIsEvaluationError) {
    const auto spec = external_blackbox(fixture("sleep", 0.5));
    EXPECT_THROW(spec.evaluate(Eigen::Vector2d(1, 1)), EvaluationError);
}

TEST(External, ChildExitIsReportedAndRestarted) {
    const auto spec = external_blackbox(fixture("exit"));
    EXPECT_NO_THROW(spec.evaluate(Eigen::Vector2d(1, 1)));
    EXPECT_THROW(spec.evaluate(Eigen::Vector2d(1, 1)), EvaluationError);
    // a fresh child answers its first call again
    EXPECT_NO_THROW(spec.evaluate(Eigen::Vector2d(1, 1)));
}

TEST(External, MissingExecutableIsEvaluationError) {
    auto d = fixture("echo");
    d.command = {"/nonexistent/xferbo-blackbox"};
    const auto spec = external_blackbox(d);
    EXPECT_THROW(spec.evaluate(Eigen::Vector2d(1, 1)), EvaluationError);
}

TEST(External, DescriptorJson) {
    const auto d = fixture("echo");
    const auto back = ExternalDescriptor::from_json(d.to_json());
    EXPECT_EQ(back.command, d.command);
    EXPECT_EQ(back.variables.size(), 2u);
    EXPECT_EQ(back.constraints[0].name, "c");
    auto j = nlohmann::json::parse(R"({"name":"s","command":"echo hi","variables":[{"name":"x","lower":0,"upper":1}]})");
    EXPECT_EQ(ExternalDescriptor::from_json(j).command,
              (std::vector<std::string>{"/bin/sh", "-c", "echo hi"}));
    j["variables"][0]["upper"] = -1;
    EXPECT_THROW(ExternalDescriptor::from_json(j), ConfigError);
    EXPECT_THROW(ExternalDescriptor::from_json(nlohmann::json::parse(R"({"name":"s"})")), ConfigError);
}
