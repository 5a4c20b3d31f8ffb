#include "xferbo/doe.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

#include "xferbo/errors.hpp"
#include "xferbo/random.hpp"

namespace xferbo {

std::string_view to_string(ConstraintCategory category) {
    switch (category) {
    case ConstraintCategory::performance: return "performance";
    case ConstraintCategory::volumetric_integration: return "volumetric_integration";
    case ConstraintCategory::operational: return "operational";
    case ConstraintCategory::environmental: return "environmental";
    case ConstraintCategory::other: return "other";
    }
    return "other";
}

ConstraintCategory parse_category(std::string_view text) {
    for (auto c : {ConstraintCategory::performance, ConstraintCategory::volumetric_integration,
                   ConstraintCategory::operational, ConstraintCategory::environmental, ConstraintCategory::other}) {
        if (text == to_string(c)) return c;
    }
    throw ConfigError("unknown constraint category '" + std::string(text) + "'");
}

bool names_match(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

void validate_variables(std::span<const VariableMeta> variables) {
    if (variables.empty()) throw std::invalid_argument("at least one variable is required");
    std::set<std::string> seen;
    for (const auto& v : variables) {
        if (v.name.empty()) throw std::invalid_argument("variable name must be nonempty");
        if (!(v.lower < v.upper))
            throw std::invalid_argument("variable '" + v.name + "' needs lower < upper");
        std::string key = v.name;
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        if (!seen.insert(key).second) throw std::invalid_argument("duplicate variable name '" + v.name + "'");
    }
}

Doe::Doe(std::vector<VariableMeta> variables, Eigen::MatrixXd inputs, Eigen::VectorXd objective,
         std::vector<ConstraintColumn> constraints)
    : variables_(std::move(variables)),
      inputs_(std::move(inputs)),
      objective_(std::move(objective)),
      constraints_(std::move(constraints)) {
    validate_variables(variables_);
    const auto n = inputs_.rows();
    if (n < 1) throw std::invalid_argument("a DOE needs at least one row");
    if (inputs_.cols() != static_cast<Eigen::Index>(variables_.size()))
        throw std::invalid_argument("input column count does not match the variable list");
    if (objective_.size() != n) throw std::invalid_argument("objective length does not match input rows");
    for (const auto& c : constraints_) {
        if (c.values.size() != n)
            throw std::invalid_argument("constraint '" + c.meta.name + "' length does not match input rows");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index d = 0; d < inputs_.cols(); ++d) {
            const double v = inputs_(i, d);
            const auto& meta = variables_[static_cast<std::size_t>(d)];
            if (!(v >= meta.lower && v <= meta.upper))
                throw std::invalid_argument("row " + std::to_string(i) + " is outside the bounds of '" +
                                            meta.name + "'");
        }
    }
}

bool Doe::feasible(std::size_t i) const {
    return std::all_of(constraints_.begin(), constraints_.end(),
                       [i](const ConstraintColumn& c) { return c.values(static_cast<Eigen::Index>(i)) <= 0.0; });
}

Doe Doe::append(const Eigen::VectorXd& x, double objective, std::span<const double> constraint_values) const {
    if (constraint_values.size() != constraints_.size())
        throw std::invalid_argument("constraint value count does not match the DOE");
    const auto n = inputs_.rows();
    Eigen::MatrixXd inputs(n + 1, inputs_.cols());
    inputs.topRows(n) = inputs_;
    inputs.row(n) = x.transpose();
    Eigen::VectorXd obj(n + 1);
    obj.head(n) = objective_;
    obj(n) = objective;
    auto cons = constraints_;
    for (std::size_t j = 0; j < cons.size(); ++j) {
        Eigen::VectorXd v(n + 1);
        v.head(n) = cons[j].values;
        v(n) = constraint_values[j];
        cons[j].values = std::move(v);
    }
    return Doe(variables_, std::move(inputs), std::move(obj), std::move(cons));
}

std::vector<ConstraintMeta> Doe::constraint_metas() const {
    std::vector<ConstraintMeta> out;
    out.reserve(constraints_.size());
    for (const auto& c : constraints_) out.push_back(c.meta);
    return out;
}

ProblemSpec ProblemSpec::from_functions(std::string name, std::vector<VariableMeta> variables,
                                        ScalarFunction objective,
                                        std::vector<std::pair<ConstraintMeta, ScalarFunction>> constraints) {
    ProblemSpec spec;
    spec.name = std::move(name);
    spec.variables = std::move(variables);
    std::vector<ScalarFunction> handles;
    for (auto& [meta, fn] : constraints) {
        spec.constraints.push_back(meta);
        handles.push_back(std::move(fn));
    }
    spec.evaluate = [objective = std::move(objective), handles = std::move(handles)](const Eigen::VectorXd& x) {
        Evaluation e;
        e.objective = objective(x);
        e.constraints.reserve(handles.size());
        for (const auto& h : handles) e.constraints.push_back(h(x));
        return e;
    };
    return spec;
}

namespace {

double clamp_to(const VariableMeta& v, double x) { return std::clamp(x, v.lower, v.upper); }

} // namespace

Eigen::MatrixXd lhs_sample(std::span<const VariableMeta> variables, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("lhs_sample needs count >= 1");
    validate_variables(variables);
    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(count);
    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(variables.size()));
    std::vector<std::size_t> perm(count);
    for (std::size_t d = 0; d < variables.size(); ++d) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        rng.shuffle(perm.begin(), perm.end());
        const auto& v = variables[d];
        for (std::size_t i = 0; i < count; ++i) {
            // u stays strictly below (stratum + 1) / count
            const double u = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(count);
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = clamp_to(v, v.lower + u * v.width());
        }
    }
    return out;
}

Eigen::MatrixXd uniform_sample(std::span<const VariableMeta> variables, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("uniform_sample needs count >= 1");
    validate_variables(variables);
    Rng rng(seed);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(variables.size()));
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (std::size_t d = 0; d < variables.size(); ++d) {
            const auto& v = variables[d];
            out(i, static_cast<Eigen::Index>(d)) = clamp_to(v, rng.uniform(v.lower, v.upper));
        }
    }
    return out;
}

std::string_view to_string(SamplingScheme scheme) {
    return scheme == SamplingScheme::lhs ? "lhs" : "uniform";
}

SamplingScheme parse_sampling(std::string_view text) {
    if (text == "lhs") return SamplingScheme::lhs;
    if (text == "uniform") return SamplingScheme::uniform;
    throw ConfigError("unknown sampling scheme '" + std::string(text) + "'");
}

Eigen::MatrixXd sample(SamplingScheme scheme, std::span<const VariableMeta> variables, std::size_t count,
                       std::uint64_t seed) {
    return scheme == SamplingScheme::lhs ? lhs_sample(variables, count, seed)
                                         : uniform_sample(variables, count, seed);
}

Doe evaluate_doe(const ProblemSpec& spec, const Eigen::MatrixXd& inputs) {
    if (!spec.evaluate) throw std::invalid_argument("problem '" + spec.name + "' has no blackbox");
    const auto n = inputs.rows();
    Eigen::VectorXd objective(n);
    std::vector<ConstraintColumn> constraints;
    constraints.reserve(spec.constraints.size());
    for (const auto& meta : spec.constraints) constraints.push_back({meta, Eigen::VectorXd(n)});

    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd x = inputs.row(i).transpose();
        Evaluation e;
        try {
            e = spec.evaluate(x);
        } catch (const EvaluationError& err) {
            throw EvaluationError(static_cast<std::size_t>(i), err.cause());
        } catch (const std::exception& err) {
            throw EvaluationError(static_cast<std::size_t>(i), err.what());
        }
        if (e.constraints.size() != constraints.size())
            throw EvaluationError(static_cast<std::size_t>(i), "blackbox returned " +
                                                                   std::to_string(e.constraints.size()) +
                                                                   " constraint values, expected " +
                                                                   std::to_string(constraints.size()));
        objective(i) = e.objective;
        for (std::size_t j = 0; j < constraints.size(); ++j) constraints[j].values(i) = e.constraints[j];
    }
    return Doe(spec.variables, inputs, std::move(objective), std::move(constraints));
}

} // namespace xferbo
