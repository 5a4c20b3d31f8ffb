#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "xferbo/history.hpp"
#include "xferbo/random.hpp"

using namespace xferbo;

namespace {

RunHistory random_history(std::uint64_t seed, std::size_t n, double infeasible_rate) {
    Rng rng(seed);
    RunHistory h;
    h.method = "VBO";
    h.variables = {{"x", 0, 1}};
    h.constraints = {{"c", ConstraintCategory::other}};
    h.initial_size = 3;
    for (std::size_t i = 0; i < n; ++i) {
        IterationRecord r;
        r.iteration = i < 3 ? 0 : static_cast<int>(i - 2);
        r.x = Eigen::VectorXd::Constant(1, rng.uniform());
        r.objective = std::round(rng.uniform(-5, 5) * 4) / 4;  // ties on purpose
        r.constraints = {rng.uniform() < infeasible_rate ? 1.0 : -1.0};
        h.records.push_back(r);
    }
    update_running_best(h);
    return h;
}

} // namespace

TEST(History, BestFeasibleMatchesLinearScan) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto h = random_history(seed, 20, 0.5);
        std::optional<std::size_t> want;
        for (std::size_t i = 0; i < h.records.size(); ++i)
            if (h.records[i].constraints[0] <= 0 && (!want || h.records[i].objective < h.records[*want].objective))
                want = i;
        const auto got = best_feasible(h);
        ASSERT_EQ(got.has_value(), want.has_value());
        if (!want) continue;
        EXPECT_EQ(got->record, *want);
        EXPECT_EQ(got->objective, h.records[*want].objective);
        EXPECT_EQ(h.records.back().best_feasible_so_far, got->objective);
    }
}

TEST(History, AllInfeasibleHasNoBest) {
    const auto h = random_history(1, 10, 1.0);
    EXPECT_FALSE(best_feasible(h).has_value());
    for (const auto& r : h.records) {
        EXPECT_FALSE(r.feasible);
        EXPECT_EQ(r.best_feasible_so_far, HUGE_VAL);
    }
}

TEST(History, ConstraintAtZeroIsFeasible) {
    RunHistory h;
    h.records.push_back({0, Eigen::VectorXd::Zero(1), 2.0, {0.0}});
    h.records.push_back({0, Eigen::VectorXd::Zero(1), 1.0, {1e-300}});
    update_running_best(h);
    EXPECT_TRUE(h.records[0].feasible);
    EXPECT_FALSE(h.records[1].feasible);
    EXPECT_EQ(best_feasible(h)->objective, 2.0);
}

TEST(History, BestPerIterationIsMonotone) {
    const auto h = random_history(3, 25, 0.3);
    const auto b = h.best_per_iteration();
    ASSERT_EQ(b.size(), 23u);
    for (std::size_t i = 1; i < b.size(); ++i) EXPECT_LE(b[i], b[i - 1]);
}

TEST(History, CsvFormat) {
    RunHistory h;
    h.records.push_back({0, Eigen::VectorXd::Zero(1), 0.5, {1.0}});
    h.records.push_back({0, Eigen::VectorXd::Zero(1), 0.25, {-1.0}});
    h.records.push_back({1, Eigen::VectorXd::Zero(1), 0.125, {-1.0}});
    update_running_best(h);
    std::ostringstream os;
    write_history_csv(os, h, 2.0);
    EXPECT_EQ(os.str(),
              "iter,best_feasible,objective,feasible,wall_time\n"
              "0,inf,0.5,0,2\n"
              "0,0.25,0.25,1,4\n"
              "1,0.125,0.125,1,6\n");
}

TEST(History, SidecarCarriesPointsAndOptionalTime) {
    auto h = random_history(4, 5, 0.0);
    h.records[4].wall_time_seconds = 0.75;
    const auto without = history_sidecar(h, false);
    const auto with = history_sidecar(h, true);
    EXPECT_FALSE(without["records"][4].contains("wall_time_seconds"));
    EXPECT_EQ(with["records"][4]["wall_time_seconds"], 0.75);
    EXPECT_EQ(with["records"].size(), 5u);
    EXPECT_EQ(with["method"], "VBO");
}
