#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xferbo/gp.hpp"
#include "xferbo/transfer.hpp"

namespace xferbo {

/// Ensemble standard-deviation policy: TV uses the target GP, AV the probability-weighted sources.
enum class VariancePolicy { target, weighted };

std::string_view to_string(VariancePolicy policy);

/// A source GP with its fitted transfer parameters, criteria and ensemble probability.
struct SourceModel {
    std::string name;
    std::shared_ptr<const Surrogate> model;
    double alpha = 1.0;
    double beta = 0.0;
    CriteriaScores criteria;
    double probability = 0.0;

    /// Mean alpha * m + beta, sd |alpha| * s.
    Prediction predict_adjusted(const Eigen::VectorXd& x) const;
};

struct NamedSource {
    std::string name;
    std::shared_ptr<const Surrogate> model;
};

struct EnsembleConfig {
    CriteriaConfig criteria = CriteriaConfig::preset(SurrogateRole::objective);
    VariancePolicy variance_policy = VariancePolicy::target;
    /// Adds the target GP as a member, scored on its leave-one-out predictions.
    bool include_target_member = false;
    /// Overrides the computed probabilities (one per member, same order); used to freeze weights.
    std::optional<std::vector<double>> fixed_probabilities;
};

/// Probability-weighted combination of adjusted source models. With no members it is exactly
/// the target GP.
class EnsembleSurrogate final : public Surrogate {
public:
    EnsembleSurrogate(std::vector<SourceModel> sources, std::shared_ptr<const GpModel> target_gp,
                      VariancePolicy policy, bool informative = true);

    Prediction predict(const Eigen::VectorXd& x) const override;
    std::size_t dim() const override { return target_->dim(); }

    const std::vector<SourceModel>& sources() const { return sources_; }
    const GpModel& target_gp() const { return *target_; }
    VariancePolicy variance_policy() const { return policy_; }
    bool informative() const { return informative_; }
    std::vector<double> probabilities() const;

    /// Per-member {name, alpha, beta, tau_shape, tau_accuracy, tau_variance, probability}.
    nlohmann::json diagnostics() const;

private:
    std::vector<SourceModel> sources_;
    std::shared_ptr<const GpModel> target_;
    VariancePolicy policy_;
    bool informative_;
};

/// Fits (alpha, beta), scores every source and assigns probabilities in place.
/// Returns the probability vector.
std::vector<double> score_and_weight(std::vector<SourceModel>& sources, const Eigen::MatrixXd& target_inputs,
                                     const Eigen::VectorXd& target_values, const CriteriaConfig& config);
/// Same, with the role's fixed weight preset.
std::vector<double> score_and_weight(std::vector<SourceModel>& sources, const Eigen::MatrixXd& target_inputs,
                                     const Eigen::VectorXd& target_values, SurrogateRole role);

/// Ensemble from already-trained source models (the per-iteration path; source GPs are cached).
EnsembleSurrogate build_ensemble(const std::vector<NamedSource>& sources, std::shared_ptr<const GpModel> target_gp,
                                 const EnsembleConfig& config);

struct SourceData {
    std::string name;
    Eigen::MatrixXd inputs;
    Eigen::VectorXd outputs;
    std::vector<VariableMeta> bounds;
};

/// Full pipeline: train the target GP, train each source GP (dropping failures with a warning),
/// fit transfers, score and weight.
EnsembleSurrogate build_ensemble(const std::vector<SourceData>& sources, const Doe& target, int target_column,
                                 const EnsembleConfig& config, const GpConfig& gp_config,
                                 KernelKind source_kernel = KernelKind::se);

} // namespace xferbo
