#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace xferbo {

/// A design variable: its identifying name and box bounds.
struct VariableMeta {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;

    double width() const { return upper - lower; }
    double midpoint() const { return 0.5 * (lower + upper); }
};

/// Discipline tags used to match constraints across problems that do not share names.
enum class ConstraintCategory {
    performance,
    volumetric_integration,
    operational,
    environmental,
    other,
};

std::string_view to_string(ConstraintCategory category);
/// Throws ConfigError on unknown tags.
ConstraintCategory parse_category(std::string_view text);

struct ConstraintMeta {
    std::string name;
    ConstraintCategory category = ConstraintCategory::other;
};

struct ConstraintColumn {
    ConstraintMeta meta;
    Eigen::VectorXd values;
};

/// Validates a variable list: nonempty unique names, lower < upper.
void validate_variables(std::span<const VariableMeta> variables);

/// Case-insensitive name equality used for all meta-data matching.
bool names_match(std::string_view a, std::string_view b);

/// Design of experiments: inputs (N x D, un-normalized), objective and constraint columns.
/// Values are immutable once constructed; `append` returns a new DOE.
class Doe {
public:
    Doe(std::vector<VariableMeta> variables, Eigen::MatrixXd inputs, Eigen::VectorXd objective,
        std::vector<ConstraintColumn> constraints = {});

    const std::vector<VariableMeta>& variables() const { return variables_; }
    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const Eigen::VectorXd& objective() const { return objective_; }
    const std::vector<ConstraintColumn>& constraints() const { return constraints_; }
    const ConstraintColumn& constraint(std::size_t i) const { return constraints_.at(i); }

    std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
    std::size_t dim() const { return variables_.size(); }
    std::size_t constraint_count() const { return constraints_.size(); }

    /// True iff every constraint value of row i is <= 0.
    bool feasible(std::size_t i) const;

    Doe append(const Eigen::VectorXd& x, double objective, std::span<const double> constraint_values) const;

    std::vector<ConstraintMeta> constraint_metas() const;

private:
    std::vector<VariableMeta> variables_;
    Eigen::MatrixXd inputs_;
    Eigen::VectorXd objective_;
    std::vector<ConstraintColumn> constraints_;
};

/// Result of one blackbox call.
struct Evaluation {
    double objective = 0.0;
    std::vector<double> constraints;
};

using Blackbox = std::function<Evaluation(const Eigen::VectorXd&)>;
using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;

/// An optimization problem: min objective(x) s.t. c_i(x) <= 0 over the variable box.
struct ProblemSpec {
    std::string name;
    std::vector<VariableMeta> variables;
    std::vector<ConstraintMeta> constraints;
    Blackbox evaluate;

    std::size_t dim() const { return variables.size(); }

    /// Builds a spec from one objective and one handle per constraint.
    static ProblemSpec from_functions(std::string name, std::vector<VariableMeta> variables,
                                      ScalarFunction objective,
                                      std::vector<std::pair<ConstraintMeta, ScalarFunction>> constraints = {});
};

/// Latin hypercube sample: every column has exactly one point per equal-width stratum.
/// Points are jittered uniformly inside their stratum; strata paired by independent permutations.
Eigen::MatrixXd lhs_sample(std::span<const VariableMeta> variables, std::size_t count, std::uint64_t seed);

/// Independent uniform sample over the variable box.
Eigen::MatrixXd uniform_sample(std::span<const VariableMeta> variables, std::size_t count, std::uint64_t seed);

enum class SamplingScheme { uniform, lhs };
std::string_view to_string(SamplingScheme scheme);
SamplingScheme parse_sampling(std::string_view text);

Eigen::MatrixXd sample(SamplingScheme scheme, std::span<const VariableMeta> variables, std::size_t count,
                       std::uint64_t seed);

/// Evaluates the blackbox once per row in row order. Throws EvaluationError naming the failing row.
Doe evaluate_doe(const ProblemSpec& spec, const Eigen::MatrixXd& inputs);

} // namespace xferbo
