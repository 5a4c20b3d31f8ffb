#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

namespace xferbo {

/// Derives an independent child seed from a parent seed, a tag and an index.
/// Used so that every stochastic step (DOE, GP restarts, acquisition) owns its stream.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0);

/// Portable random source: mt19937_64 with explicit transforms, so sequences do
/// not depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n);

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            using std::swap;
            swap(first[i - 1], first[index(i)]);
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace xferbo
