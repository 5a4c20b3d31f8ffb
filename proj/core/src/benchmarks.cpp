#include "xferbo/benchmarks.hpp"

#include <cmath>
#include <numbers>

#include "xferbo/errors.hpp"
#include "xferbo/random.hpp"

namespace xferbo {

namespace {
constexpr double pi = std::numbers::pi;
}

namespace bohachevsky {

double source1(double x1, double x2) {
    return x1 * x1 + 2.0 * x2 * x2 - 0.3 * std::cos(pi * x1) - 0.4 * std::cos(2.0 * pi * x2) + 0.7;
}

double source2(double x1, double x2) {
    return x1 * x1 + 2.0 * x2 * x2 - 0.3 * std::cos(pi * x1) * std::cos(2.0 * pi * x2);
}

double source3(double x1, double x2) {
    return 2.0 * x1 * x1 + 4.0 * x2 * x2 - 0.3 * std::cos(3.0 * pi * x1 + 4.0 * pi * x2) - 0.5;
}

double target(double x1, double x2) {
    return 0.5 * x1 * x1 + x2 * x2 - 0.3 * std::cos(3.0 * pi * x1 + 4.0 * pi * x2) + 0.4;
}

} // namespace bohachevsky

namespace rosenbrock_mf {

double source1(const Eigen::VectorXd& x) {
    const Eigen::Index d = x.size();
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
        const double a = x(i + 1) - x(i) * x(i);
        const double b = -2.0 - x(i);
        s += 50.0 * a * a + b * b;
    }
    return s - 0.5 * x.sum();
}

double source2(const Eigen::VectorXd& x) {
    const double d = static_cast<double>(x.size());
    // the denominator sums x_1 (not x_i) D times
    return (source1(x) - 4.0 - 0.5 * x.sum()) / (10.0 + 0.25 * d * x(0));
}

double target(const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x(i + 1) - x(i) * x(i);
        const double b = 1.0 - x(i);
        s += 100.0 * a * a + b * b;
    }
    return s;
}

} // namespace rosenbrock_mf

namespace {

std::vector<VariableMeta> box(std::size_t dim, double lo, double hi) {
    std::vector<VariableMeta> v;
    for (std::size_t i = 0; i < dim; ++i) v.push_back({"x" + std::to_string(i + 1), lo, hi});
    return v;
}

ScalarFunction planar(double (*f)(double, double)) {
    return [f](const Eigen::VectorXd& x) { return f(x(0), x(1)); };
}

} // namespace

BenchmarkCase bohachevsky_case() {
    BenchmarkCase c;
    c.name = "bohachevsky";
    const auto vars = box(2, -5.0, 5.0);
    c.target = ProblemSpec::from_functions("bohachevsky_T", vars, planar(bohachevsky::target));
    c.sources = {
        {"S1", ProblemSpec::from_functions("bohachevsky_S1", vars, planar(bohachevsky::source1)), 50,
         SamplingScheme::lhs},
        {"S2", ProblemSpec::from_functions("bohachevsky_S2", vars, planar(bohachevsky::source2)), 50,
         SamplingScheme::lhs},
        {"S3", ProblemSpec::from_functions("bohachevsky_S3", vars, planar(bohachevsky::source3)), 50,
         SamplingScheme::lhs},
    };
    c.reference = {2, 20, 20};
    return c;
}

BenchmarkCase rosenbrock_mf_case(std::size_t dim) {
    if (dim < 2) throw ConfigError("rosenbrock_mf22 needs at least 2 variables");
    BenchmarkCase c;
    c.name = "rosenbrock_mf22";
    const auto vars = box(dim, -2.0, 2.0);
    c.target = ProblemSpec::from_functions("rosenbrock_T", vars, rosenbrock_mf::target);
    c.sources = {
        {"S1", ProblemSpec::from_functions("rosenbrock_S1", vars, rosenbrock_mf::source1), 100, SamplingScheme::lhs},
        {"S2", ProblemSpec::from_functions("rosenbrock_S2", vars, rosenbrock_mf::source2), 100, SamplingScheme::lhs},
    };
    c.reference = {dim, 100, 20};
    return c;
}

BenchmarkCase constrained_toy_case() {
    BenchmarkCase c;
    c.name = "constrained_toy";
    const std::vector<VariableMeta> vars = {{"x1", 0.0, 1.5}, {"x2", 0.0, 1.5}};
    c.target = ProblemSpec::from_functions(
        "constrained_toy_T", vars, planar(bohachevsky::target),
        {
            {{"thrust_margin", ConstraintCategory::performance},
             [](const Eigen::VectorXd& x) { return 1.0 - x(0) - x(1); }},
            {{"fuel_volume", ConstraintCategory::volumetric_integration},
             [](const Eigen::VectorXd& x) { return x.squaredNorm() - 2.25; }},
        });

    // Scaled, biased relative of the target with an extra variable x3 (dropped on alignment);
    // its volume constraint goes by another name.
    const std::vector<VariableMeta> s1_vars = {{"x1", 0.0, 1.5}, {"x2", 0.0, 1.5}, {"x3", 0.0, 1.0}};
    ProblemSpec s1 = ProblemSpec::from_functions(
        "constrained_toy_S1", s1_vars,
        [](const Eigen::VectorXd& x) {
            return 1.5 * bohachevsky::target(x(0), x(1)) - 0.2 + 0.05 * x(0) + 0.1 * x(2);
        },
        {
            {{"thrust_margin", ConstraintCategory::performance},
             [](const Eigen::VectorXd& x) { return 1.1 - x(0) - x(1) + 0.05 * x(2); }},
            {{"tank_volume", ConstraintCategory::volumetric_integration},
             [](const Eigen::VectorXd& x) { return x(0) * x(0) + x(1) * x(1) - 2.1375; }},
        });

    // Only x1; x2 is masked on alignment.
    const std::vector<VariableMeta> s2_vars = {{"x1", 0.0, 1.5}};
    ProblemSpec s2 = ProblemSpec::from_functions(
        "constrained_toy_S2", s2_vars,
        [](const Eigen::VectorXd& x) { return 0.5 * x(0) * x(0) - 0.3 * std::cos(3.0 * pi * x(0)) + 0.4; },
        {
            {{"thrust_margin", ConstraintCategory::performance},
             [](const Eigen::VectorXd& x) { return 1.0 - 2.0 * x(0); }},
            {{"noise_level", ConstraintCategory::environmental},
             [](const Eigen::VectorXd& x) { return x(0) - 4.0; }},
        });

    c.sources = {{"S1", std::move(s1), 50, SamplingScheme::lhs}, {"S2", std::move(s2), 50, SamplingScheme::lhs}};
    c.reference = {5, 25, 20};
    return c;
}

std::vector<std::string> case_names() { return {"bohachevsky", "rosenbrock_mf22", "constrained_toy"}; }

BenchmarkCase make_case(std::string_view name) {
    if (name == "bohachevsky") return bohachevsky_case();
    if (name == "rosenbrock_mf22") return rosenbrock_mf_case();
    if (name == "constrained_toy") return constrained_toy_case();
    throw ConfigError("unknown case '" + std::string(name) + "'");
}

std::vector<SourceProblem> generate_source_does(const BenchmarkCase& bench, std::uint64_t seed,
                                                std::optional<std::size_t> doe_size) {
    std::vector<SourceProblem> out;
    for (std::size_t j = 0; j < bench.sources.size(); ++j) {
        const auto& g = bench.sources[j];
        const auto inputs = sample(g.sampling, g.problem.variables, doe_size.value_or(g.doe_size),
                                   derive_seed(seed, "source", j));
        out.push_back({g.name, evaluate_doe(g.problem, inputs)});
    }
    return out;
}

} // namespace xferbo
