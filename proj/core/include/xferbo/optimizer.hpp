#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xferbo/acquisition.hpp"
#include "xferbo/doe.hpp"
#include "xferbo/ensemble.hpp"
#include "xferbo/gp.hpp"
#include "xferbo/history.hpp"
#include "xferbo/transfer.hpp"

namespace xferbo {

enum class OptimizerMode { vbo, tlbo };

/// Kernel for source GPs: `automatic` uses KPLS when alignment masked or dropped variables.
enum class SourceKernelPolicy { automatic, se, kpls };

struct OptimizerConfig {
    int max_iter = 20;
    OptimizerMode mode = OptimizerMode::vbo;
    /// TLBO only: every k-th iteration uses the plain target GPs.
    std::optional<int> alternation_interval;
    VariancePolicy variance_policy = VariancePolicy::target;
    std::uint64_t seed = 0;
    CriteriaConfig objective_criteria = CriteriaConfig::preset(SurrogateRole::objective);
    CriteriaConfig constraint_criteria = CriteriaConfig::preset(SurrogateRole::constraint);
    AcquisitionConfig acquisition;
    /// Hyperparameter search settings; its seed field is ignored (derived from `seed`).
    GpConfig gp;
    /// Keep the ensemble probabilities of iteration k for all later iterations.
    std::optional<int> freeze_probabilities_after;
    SourceKernelPolicy source_kernel = SourceKernelPolicy::automatic;
    bool include_target_member = false;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

struct SourceProblem {
    std::string name;
    Doe doe;
};

/// Constrained BO on target-only SE GPs. History holds the initial DOE then max_iter evaluations.
RunHistory run_vbo(const ProblemSpec& spec, const Doe& initial_doe, const OptimizerConfig& config);

/// Constrained BO on transfer ensembles. Source GPs are aligned, matched and trained once;
/// ensembles are rebuilt (transfer, scores, probabilities) every iteration.
RunHistory run_tlbo(const ProblemSpec& spec, const std::vector<SourceProblem>& sources, const Doe& initial_doe,
                    const OptimizerConfig& config);

/// Dispatches on config.mode.
RunHistory run_optimizer(const ProblemSpec& spec, const std::vector<SourceProblem>& sources, const Doe& initial_doe,
                         const OptimizerConfig& config);

} // namespace xferbo
