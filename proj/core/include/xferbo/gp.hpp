#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "xferbo/doe.hpp"
#include "xferbo/kernels.hpp"
#include "xferbo/surrogate.hpp"

namespace xferbo {

struct GpConfig {
    int n_starts = 10;
    /// Box for log(l_d) (SE) or log(theta_l) (KPLS), in normalized input units.
    double log_hyper_lower = std::log(1e-2);
    double log_hyper_upper = std::log(1e2);
    /// Simplex budget per start; 0 picks 30 * (parameters + 1).
    int max_evaluations_per_start = 0;
    /// Relative nugget added to the correlation diagonal; escalated x10 on Cholesky failure.
    double nugget = 1e-10;
    double max_nugget = 1e-6;
    std::uint64_t seed = 0;
    /// KPLS only; 0 means min(4, number of unmasked variables).
    int kpls_max_components = 0;
};

/// Maps raw inputs to the unit hypercube and outputs to zero mean / unit variance.
struct Normalization {
    Eigen::VectorXd lower;
    Eigen::VectorXd width;
    double y_mean = 0.0;
    double y_scale = 1.0;

    static Normalization fit(std::span<const VariableMeta> bounds, const Eigen::VectorXd& outputs);
    Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& inputs) const;
};

/// Closed-form generalized least squares estimates for fixed correlation hyperparameters.
struct ProfiledLikelihood {
    double mean_bias = 0.0;
    double variance = 0.0;
    double log_ml = 0.0;
    double nugget = 0.0;
};

/// log-ML = -1/2 (N ln(2 pi s2) + ln det R + (y - 1b)^T R^-1 (y - 1b) / s2), where R is the
/// unit-variance correlation matrix of `params` (plus nugget) and s2 = kernel_variance(params).
/// `points` and `y` are in normalized units. Throws TrainingError if R is not positive definite
/// even at `max_nugget`.
double log_marginal_likelihood(const Eigen::MatrixXd& points, const Eigen::VectorXd& y, const KernelParams& params,
                               double mean_bias, double nugget = 1e-10, double max_nugget = 1e-6);

/// Profiles mean_bias and variance out of log-ML at the given correlation coefficients.
ProfiledLikelihood profile_likelihood(const Eigen::MatrixXd& points, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& coefficients, double nugget, double max_nugget);

struct LooPredictions {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
};

/// Trained Gaussian process. Kernel hyperparameters, mean bias and variance live in normalized
/// space; `predict` takes and returns raw units. Immutable and safe to share across threads.
class GpModel final : public Surrogate {
public:
    /// Factorizes the correlation matrix starting at `nugget`, escalating x10 up to `max_nugget`.
    GpModel(Eigen::MatrixXd inputs, Eigen::VectorXd outputs, Normalization normalization, KernelParams params,
            double mean_bias, double nugget = 1e-10, double max_nugget = 1e-6);

    Prediction predict(const Eigen::VectorXd& x) const override;
    std::size_t dim() const override { return static_cast<std::size_t>(inputs_.cols()); }

    KernelKind kind() const { return kernel_kind(params_); }
    const KernelParams& kernel() const { return params_; }
    /// Mean bias in standardized output units.
    double mean_bias() const { return mean_bias_; }
    /// Process variance in standardized output units.
    double process_variance() const { return kernel_variance(params_); }
    double nugget() const { return nugget_; }
    const Normalization& normalization() const { return norm_; }

    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const Eigen::VectorXd& outputs() const { return outputs_; }
    const Eigen::MatrixXd& normalized_inputs() const { return xn_; }
    const Eigen::VectorXd& standardized_outputs() const { return ys_; }

    double log_marginal_likelihood() const;
    /// Closed-form leave-one-out predictions at the training inputs, raw units.
    LooPredictions leave_one_out() const;

    nlohmann::json to_json() const;
    static GpModel from_json(const nlohmann::json& doc);

private:
    Eigen::MatrixXd inputs_;
    Eigen::VectorXd outputs_;
    Normalization norm_;
    KernelParams params_;
    double mean_bias_;
    double nugget_ = 0.0;
    Eigen::MatrixXd xn_;
    Eigen::VectorXd ys_;
    Eigen::VectorXd coefficients_;
    // The final factorization runs in extended precision: designs with long length-scales reach
    // condition numbers near 1/nugget, where double round-off would show in the fourth digit of log-ML.
    using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    LVector correlations_to(const Eigen::VectorXd& xn) const;
    LMatrix chol_;   // lower-triangular factor of R + nugget I
    LVector alpha_;  // R^-1 (ys - 1 mean_bias)
};

/// One multi-start run: its starting point, where the simplex ended and log-ML there.
struct TrainingStart {
    Eigen::VectorXd log_hyper;
    Eigen::VectorXd optimum;
    double log_ml = -HUGE_VAL;
};

struct GpTrainingResult {
    GpModel model;
    std::vector<TrainingStart> starts;
    std::size_t best_start = 0;
};

/// Trains a GP by multi-start simplex maximization of the profiled log-ML.
/// `bounds` supply the normalization box. For KPLS, `mask` (length D, true = masked) forces zero
/// weights on masked variables. Deterministic for a fixed config.seed.
GpTrainingResult train_gp_detailed(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                                   std::span<const VariableMeta> bounds, KernelKind kind, const GpConfig& config,
                                   const std::vector<bool>& mask = {});

GpModel train_gp(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, std::span<const VariableMeta> bounds,
                 KernelKind kind, const GpConfig& config, const std::vector<bool>& mask = {});

/// Convenience overloads training on the objective (column < 0) or constraint `column` of a DOE.
const Eigen::VectorXd& doe_output(const Doe& doe, int column);
GpModel train_gp(const Doe& doe, int column, KernelKind kind, const GpConfig& config,
                 const std::vector<bool>& mask = {});

} // namespace xferbo
