#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "xferbo/experiment.hpp"
#include "xferbo/summary.hpp"

using namespace xferbo;

TEST(Quartiles, InclusiveMedian) {
    const auto q = inclusive_quartiles({5, 1, 4, 2, 3});
    EXPECT_EQ(q.q1, 2.0);
    EXPECT_EQ(q.median, 3.0);
    EXPECT_EQ(q.q3, 4.0);
    const auto e = inclusive_quartiles({1, 2, 3, 4});
    EXPECT_EQ(e.q1, 1.5);
    EXPECT_EQ(e.median, 2.5);
    EXPECT_EQ(e.q3, 3.5);
    const auto one = inclusive_quartiles({7});
    EXPECT_EQ(one.q1, 7.0);
    EXPECT_EQ(one.q3, 7.0);
    EXPECT_THROW(inclusive_quartiles({}), std::invalid_argument);
}

TEST(Summary, StatisticsPerIteration) {
    std::vector<RunSeries> runs;
    for (int r = 1; r <= 5; ++r) runs.push_back({{10.0 * r, 1.0 * r}, {0.0, 2.0 * r}});
    const auto s = summarize_runs("VBO", runs);
    ASSERT_EQ(s.iterations.size(), 2u);
    EXPECT_EQ(s.runs, 5u);
    EXPECT_EQ(s.iterations[0].mean, 30.0);
    EXPECT_EQ(s.iterations[1].median, 3.0);
    EXPECT_EQ(s.iterations[1].q1, 2.0);
    EXPECT_EQ(s.iterations[1].min, 1.0);
    EXPECT_EQ(s.iterations[1].max, 5.0);
    EXPECT_EQ(s.iterations[1].wall_time_mean, 6.0);
}

TEST(Summary, SingleRunAndTruncation) {
    const auto one = summarize_runs("A", {{{3.0, 2.0}, {0, 0}}});
    EXPECT_EQ(one.iterations[1].q1, 2.0);
    EXPECT_EQ(one.iterations[1].q3, 2.0);
    const auto t = summarize_runs("A", {{{3, 2, 1}, {0, 0, 0}}, {{4, 3}, {0, 0}}});
    EXPECT_EQ(t.iterations.size(), 2u);
}

TEST(Summary, CsvHeader) {
    std::ostringstream os;
    write_summary_csv(os, summarize_runs("A", {{{1.5}, {0.0}}}));
    EXPECT_EQ(os.str(), "iter,mean,median,q1,q3,min,max,wall_time_mean\n0,1.5,1.5,1.5,1.5,1.5,1.5,0\n");
}

TEST(Summary, ReadBackMatchesInMemorySeries) {
    RunHistory h;
    h.method = "VBO";
    for (int i = 0; i < 6; ++i) {
        IterationRecord r;
        r.iteration = std::max(0, i - 2);
        r.x = Eigen::VectorXd::Zero(1);
        r.objective = 10.0 - 1.5 * i + (i == 4 ? 20 : 0);
        h.records.push_back(r);
    }
    update_running_best(h);
    const auto dir = std::filesystem::temp_directory_path() / "xferbo_summary_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "history_VBO_run01.csv").string();
    {
        std::ofstream out(path);
        write_history_csv(out, h, 3.0);
    }
    const auto read = read_history_series(path);
    const auto mem = series_from_history(h, 3.0);
    EXPECT_EQ(read.best, mem.best);
    EXPECT_EQ(read.wall_time, mem.wall_time);
    ASSERT_EQ(read.best.size(), 4u);
    EXPECT_EQ(read.wall_time[0], 9.0);
    const auto all = summarize_directory(dir.string());
    ASSERT_EQ(all.methods.size(), 1u);
    EXPECT_EQ(all.methods[0].method, "VBO");
    std::filesystem::remove_all(dir);
}
