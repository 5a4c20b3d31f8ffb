#pragma once

#include <vector>

#include <Eigen/Dense>

#include "xferbo/surrogate.hpp"

namespace xferbo {

/// Scale and bias mapping a source model onto target data: adjusted = alpha * source + beta.
struct TransferFit {
    double alpha = 1.0;
    double beta = 0.0;
};

/// Exact least-squares minimizer of sum (alpha * s_i + beta - t_i)^2. Constant source
/// predictions give alpha = 0, beta = mean(t).
TransferFit fit_transfer(const Eigen::VectorXd& source_predictions, const Eigen::VectorXd& target_values);
TransferFit fit_transfer(const Surrogate& source, const Eigen::MatrixXd& target_inputs,
                         const Eigen::VectorXd& target_values);

/// Shape criterion: sum over m = 1..n, k = 2..n of [(s_m < s_k) xor (t_m < t_k)], divided by n.
/// The index set (k from 2, m == k allowed) and the 1/n normalization are kept literally.
double discordant_tau(const Eigen::VectorXd& source_predictions, const Eigen::VectorXd& target_values);

/// Largest value of discordant_tau for n points (a fully reversed ranking): (n-1)^2 / n.
double discordant_tau_max(std::size_t n);

/// delta(tau / rho) with delta(t) = 3/4 (1 - t^2) for t <= 1, else 0.
double epanechnikov(double tau, double rho);

/// Fraction of points with |s - t| / |t| > eps_max. Targets with |t| < 1e-12 use |s - t| instead.
double accuracy_tau(const Eigen::VectorXd& source_predictions, const Eigen::VectorXd& target_values, double eps_max);

/// Fraction of points with sd / max|t| > sigma_max (strict). Returns 0 if max|t| == 0.
double variance_tau(const Eigen::VectorXd& source_sds, const Eigen::VectorXd& target_values, double sigma_max);

enum class SurrogateRole { objective, constraint };

struct CriteriaConfig {
    double w_shape = 0.5;
    double w_accuracy = 0.0;
    double w_variance = 0.5;
    double rho_shape = 1.0;
    double rho_accuracy = 1.0;
    double rho_variance = 1.0;
    double eps_max = 0.05;
    double sigma_max = 0.1;

    /// Objective: shape and variance, 1/2 each. Constraint: shape, accuracy and variance, 1/3 each.
    static CriteriaConfig preset(SurrogateRole role);
    /// Throws std::invalid_argument unless weights are nonnegative, sum to 1, and bandwidths are positive.
    void validate() const;
};

struct CriteriaScores {
    double tau_shape = 0.0;
    double tau_accuracy = 0.0;
    double tau_variance = 0.0;
    double c_shape = 0.0;
    double c_accuracy = 0.0;
    double c_variance = 0.0;
    /// Weighted sum C = sum_l w_l c_l.
    double score = 0.0;
};

/// Scores one source. The shape criterion ranks the unadjusted source predictions (a negative
/// scale cannot hide an inverted ranking); accuracy and variance look at the adjusted model.
CriteriaScores score_criteria(const Eigen::VectorXd& raw_predictions, const Eigen::VectorXd& adjusted_predictions,
                              const Eigen::VectorXd& adjusted_sds, const Eigen::VectorXd& target_values,
                              const CriteriaConfig& config);

struct ProbabilityWeights {
    std::vector<double> probabilities;
    /// False when every score was zero and the uniform fallback was used.
    bool informative = true;
};

/// P_j = C_j / sum C. All-zero scores fall back to uniform 1/N.
ProbabilityWeights probabilities_from_scores(const std::vector<double>& scores);

} // namespace xferbo
