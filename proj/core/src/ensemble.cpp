#include "xferbo/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "xferbo/errors.hpp"
#include "xferbo/random.hpp"

namespace xferbo {

std::string_view to_string(VariancePolicy policy) { return policy == VariancePolicy::target ? "TV" : "AV"; }

Prediction SourceModel::predict_adjusted(const Eigen::VectorXd& x) const {
    const auto p = model->predict(x);
    return {alpha * p.mean + beta, std::abs(alpha) * p.sd};
}

EnsembleSurrogate::EnsembleSurrogate(std::vector<SourceModel> sources, std::shared_ptr<const GpModel> target_gp,
                                     VariancePolicy policy, bool informative)
    : sources_(std::move(sources)), target_(std::move(target_gp)), policy_(policy), informative_(informative) {
    if (!target_) throw std::invalid_argument("an ensemble needs a target GP");
}

Prediction EnsembleSurrogate::predict(const Eigen::VectorXd& x) const {
    if (sources_.empty()) return target_->predict(x);
    double mean = 0.0, var = 0.0;
    for (const auto& s : sources_) {
        if (s.probability == 0.0) continue;
        const auto p = s.predict_adjusted(x);
        mean += s.probability * p.mean;
        var += s.probability * s.probability * p.sd * p.sd;
    }
    const double sd = policy_ == VariancePolicy::target ? target_->predict(x).sd : std::sqrt(var);
    return {mean, sd};
}

std::vector<double> EnsembleSurrogate::probabilities() const {
    std::vector<double> p;
    for (const auto& s : sources_) p.push_back(s.probability);
    return p;
}

nlohmann::json EnsembleSurrogate::diagnostics() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : sources_) {
        out.push_back({{"name", s.name},
                       {"alpha", s.alpha},
                       {"beta", s.beta},
                       {"tau_shape", s.criteria.tau_shape},
                       {"tau_accuracy", s.criteria.tau_accuracy},
                       {"tau_variance", s.criteria.tau_variance},
                       {"probability", s.probability}});
    }
    return out;
}

namespace {

struct Evaluated {
    Eigen::VectorXd mean, sd;
};

Evaluated predict_all(const Surrogate& model, const Eigen::MatrixXd& inputs) {
    Evaluated e{Eigen::VectorXd(inputs.rows()), Eigen::VectorXd(inputs.rows())};
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        const auto p = model.predict(inputs.row(i).transpose());
        e.mean(i) = p.mean;
        e.sd(i) = p.sd;
    }
    return e;
}

void score_one(SourceModel& s, const Evaluated& raw, const Eigen::VectorXd& target_values,
               const CriteriaConfig& config, bool fit) {
    if (fit) {
        const auto t = fit_transfer(raw.mean, target_values);
        s.alpha = t.alpha;
        s.beta = t.beta;
    }
    const Eigen::VectorXd adjusted = (s.alpha * raw.mean.array() + s.beta).matrix();
    const Eigen::VectorXd adjusted_sd = std::abs(s.alpha) * raw.sd;
    s.criteria = score_criteria(raw.mean, adjusted, adjusted_sd, target_values, config);
}

ProbabilityWeights assign(std::vector<SourceModel>& sources) {
    std::vector<double> scores;
    for (const auto& s : sources) scores.push_back(s.criteria.score);
    auto w = probabilities_from_scores(scores);
    if (!w.informative) spdlog::warn("ensemble: no informative source, using uniform probabilities");
    for (std::size_t j = 0; j < sources.size(); ++j) sources[j].probability = w.probabilities[j];
    return w;
}

} // namespace

std::vector<double> score_and_weight(std::vector<SourceModel>& sources, const Eigen::MatrixXd& target_inputs,
                                     const Eigen::VectorXd& target_values, const CriteriaConfig& config) {
    if (sources.empty()) throw std::invalid_argument("score_and_weight needs at least one source");
    config.validate();
    for (auto& s : sources) score_one(s, predict_all(*s.model, target_inputs), target_values, config, true);
    return assign(sources).probabilities;
}

std::vector<double> score_and_weight(std::vector<SourceModel>& sources, const Eigen::MatrixXd& target_inputs,
                                     const Eigen::VectorXd& target_values, SurrogateRole role) {
    return score_and_weight(sources, target_inputs, target_values, CriteriaConfig::preset(role));
}

EnsembleSurrogate build_ensemble(const std::vector<NamedSource>& sources, std::shared_ptr<const GpModel> target_gp,
                                 const EnsembleConfig& config) {
    if (!target_gp) throw std::invalid_argument("build_ensemble needs a target GP");
    config.criteria.validate();
    const Eigen::MatrixXd& xt = target_gp->inputs();
    const Eigen::VectorXd& yt = target_gp->outputs();

    std::vector<SourceModel> members;
    for (const auto& src : sources) {
        SourceModel m;
        m.name = src.name;
        m.model = src.model;
        score_one(m, predict_all(*m.model, xt), yt, config.criteria, true);
        members.push_back(std::move(m));
    }
    if (config.include_target_member && xt.rows() >= 2) {
        SourceModel m;
        m.name = "target";
        m.model = target_gp;
        const auto loo = target_gp->leave_one_out();
        score_one(m, {loo.mean, loo.sd}, yt, config.criteria, false);
        members.push_back(std::move(m));
    }
    if (members.empty()) return EnsembleSurrogate({}, std::move(target_gp), config.variance_policy, false);

    bool informative = true;
    if (config.fixed_probabilities && config.fixed_probabilities->size() == members.size()) {
        for (std::size_t j = 0; j < members.size(); ++j) members[j].probability = (*config.fixed_probabilities)[j];
    } else {
        informative = assign(members).informative;
    }
    return EnsembleSurrogate(std::move(members), std::move(target_gp), config.variance_policy, informative);
}

EnsembleSurrogate build_ensemble(const std::vector<SourceData>& sources, const Doe& target, int target_column,
                                 const EnsembleConfig& config, const GpConfig& gp_config, KernelKind source_kernel) {
    if (sources.empty()) throw std::invalid_argument("build_ensemble needs at least one source");
    auto target_gp = std::make_shared<const GpModel>(train_gp(target, target_column, KernelKind::se, gp_config));
    std::vector<NamedSource> trained;
    for (std::size_t j = 0; j < sources.size(); ++j) {
        const auto& s = sources[j];
        GpConfig cfg = gp_config;
        cfg.seed = derive_seed(gp_config.seed, "source", j);
        try {
            trained.push_back(
                {s.name, std::make_shared<const GpModel>(train_gp(s.inputs, s.outputs, s.bounds, source_kernel, cfg))});
        } catch (const TrainingError& e) {
            spdlog::warn("ensemble: dropping source '{}': {}", s.name, e.what());
        }
    }
    return build_ensemble(trained, std::move(target_gp), config);
}

} // namespace xferbo
