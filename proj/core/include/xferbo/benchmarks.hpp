#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "xferbo/doe.hpp"
#include "xferbo/optimizer.hpp"

namespace xferbo {

namespace bohachevsky {
double source1(double x1, double x2);
double source2(double x1, double x2);
double source3(double x1, double x2);
double target(double x1, double x2);
} // namespace bohachevsky

namespace rosenbrock_mf {
/// Medium fidelity.
double source1(const Eigen::VectorXd& x);
/// Low fidelity, built on source1.
double source2(const Eigen::VectorXd& x);
/// Plain Rosenbrock.
double target(const Eigen::VectorXd& x);
} // namespace rosenbrock_mf

/// A source problem sampled fresh for every experiment seed.
struct SourceGenerator {
    std::string name;
    ProblemSpec problem;
    std::size_t doe_size = 50;
    SamplingScheme sampling = SamplingScheme::lhs;
};

struct ReferenceConfig {
    std::size_t initial_doe_size = 2;
    int iterations = 20;
    int runs = 20;
};

struct BenchmarkCase {
    std::string name;
    ProblemSpec target;
    std::vector<SourceGenerator> sources;
    ReferenceConfig reference;
};

BenchmarkCase bohachevsky_case();
BenchmarkCase rosenbrock_mf_case(std::size_t dim = 5);
BenchmarkCase constrained_toy_case();

std::vector<std::string> case_names();
/// Throws ConfigError for unknown names.
BenchmarkCase make_case(std::string_view name);

/// One DOE per generator, seeded by derive_seed(seed, "source", j). `doe_size` overrides the
/// generator sizes when set.
std::vector<SourceProblem> generate_source_does(const BenchmarkCase& bench, std::uint64_t seed,
                                                std::optional<std::size_t> doe_size = std::nullopt);

} // namespace xferbo
