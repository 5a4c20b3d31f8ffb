#pragma once

#include <functional>
#include <span>
#include <vector>

#include "xferbo/gp.hpp"
#include "xferbo/kpls.hpp"

namespace xferbo::detail {

struct HyperSearch {
    std::vector<TrainingStart> starts;
    std::size_t best_start = 0;
    Eigen::VectorXd best_log_hyper;
    ProfiledLikelihood best;
};

using CoefficientMap = std::function<Eigen::VectorXd(const Eigen::VectorXd& log_hyper)>;

/// Multi-start bounded simplex search over `n_params` log-hyperparameters.
HyperSearch search_hyperparameters(const Eigen::MatrixXd& xn, const Eigen::VectorXd& ys, int n_params,
                                   const CoefficientMap& coefficients, const GpConfig& config);

GpTrainingResult train_kpls(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                            std::span<const VariableMeta> bounds, const GpConfig& config, const std::vector<bool>& mask,
                            KplsFit* fit_out);

double loo_mse(const GpModel& model);

} // namespace xferbo::detail
