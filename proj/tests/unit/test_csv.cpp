#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "xferbo/csv.hpp"
#include "xferbo/errors.hpp"
#include "xferbo/random.hpp"

using namespace xferbo;

TEST(FormatDouble, RoundTripsExactly) {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.index(200)) - 100);
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(HUGE_VAL), "inf");
    EXPECT_EQ(format_double(-HUGE_VAL), "-inf");
    EXPECT_TRUE(std::isnan(parse_double("nan")));
    EXPECT_EQ(parse_double(format_double(std::numeric_limits<double>::denorm_min())),
              std::numeric_limits<double>::denorm_min());
}

TEST(ParseDouble, RejectsGarbage) {
    EXPECT_THROW(parse_double("1.5x"), ConfigError);
    EXPECT_THROW(parse_double(""), ConfigError);
}

TEST(SplitCsv, KeepsEmptyFieldsAndStripsCarriageReturn) {
    const auto f = split_csv_line("a,,b\r");
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f[1], "");
    EXPECT_EQ(f[2], "b");
}

TEST(DoeCsv, RandomRoundTripIsLossless) {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = 1 + rng.index(4), n = 1 + rng.index(20), m = rng.index(3);
        std::vector<VariableMeta> vars;
        for (std::size_t j = 0; j < d; ++j) vars.push_back({"v" + std::to_string(j), -3.0 - j, 2.0 + j});
        std::vector<ConstraintColumn> cons;
        for (std::size_t j = 0; j < m; ++j) {
            Eigen::VectorXd c(n);
            for (auto& x : c) x = rng.uniform(-1e6, 1e6);
            cons.push_back({{"c" + std::to_string(j), ConstraintCategory::operational}, c});
        }
        Eigen::VectorXd y(n);
        for (auto& x : y) x = rng.uniform(-1, 1) * 1e-300;
        const Doe doe(vars, lhs_sample(vars, n, trial), y, cons);
        std::stringstream ss;
        write_doe_csv(ss, doe);
        const Doe back = read_doe_csv(ss, vars, doe.constraint_metas());
        EXPECT_EQ(back.inputs(), doe.inputs());
        EXPECT_EQ(back.objective(), doe.objective());
        for (std::size_t j = 0; j < m; ++j) EXPECT_EQ(back.constraint(j).values, doe.constraint(j).values);
    }
}

TEST(DoeCsv, HeaderMismatchIsAConfigError) {
    std::stringstream ss("x_a,objective\n0.5,1\n");
    const std::vector<VariableMeta> vars = {{"b", 0.0, 1.0}};
    EXPECT_THROW(read_doe_csv(ss, vars, {}), ConfigError);
    std::stringstream ragged("x_b,objective\n0.5\n");
    EXPECT_THROW(read_doe_csv(ragged, vars, {}), ConfigError);
}
