#include <algorithm>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "xferbo/random.hpp"

using namespace xferbo;

TEST(DeriveSeed, DeterministicAndSeparatedByTagAndIndex) {
    EXPECT_EQ(derive_seed(1, "a", 0), derive_seed(1, "a", 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t base : {0ULL, 1ULL, 2ULL})
        for (const char* tag : {"a", "b", "run"})
            for (std::uint64_t i = 0; i < 10; ++i) seen.insert(derive_seed(base, tag, i));
    EXPECT_EQ(seen.size(), 90u);
}

TEST(Rng, UniformStaysInUnitInterval) {
    Rng rng(3);
    double lo = 1, hi = 0, sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_GE(lo, 0.0);
    EXPECT_LT(hi, 1.0);
    EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, IndexCoversRangeEvenly) {
    Rng rng(5);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.index(7)];
    for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, ShuffleIsAPermutationAndReproducible) {
    std::vector<int> a(50), b(50);
    std::iota(a.begin(), a.end(), 0);
    b = a;
    Rng r1(9), r2(9);
    r1.shuffle(a.begin(), a.end());
    r2.shuffle(b.begin(), b.end());
    EXPECT_EQ(a, b);
    std::vector<int> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}
