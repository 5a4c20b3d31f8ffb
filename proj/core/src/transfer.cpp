#include "xferbo/transfer.hpp"

#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace xferbo {

TransferFit fit_transfer(const Eigen::VectorXd& source_predictions, const Eigen::VectorXd& target_values) {
    const auto n = source_predictions.size();
    if (n < 1 || target_values.size() != n) throw std::invalid_argument("fit_transfer needs matching nonempty vectors");
    const double sm = source_predictions.mean();
    const double tm = target_values.mean();
    const Eigen::ArrayXd ds = source_predictions.array() - sm;
    const double sxx = ds.square().sum();
    // Relative threshold: constant predictions up to rounding count as constant.
    if (!(sxx > 1e-24 * (1.0 + sm * sm) * static_cast<double>(n))) return {0.0, tm};
    const double sxy = (ds * (target_values.array() - tm)).sum();
    const double alpha = sxy / sxx;
    return {alpha, tm - alpha * sm};
}

TransferFit fit_transfer(const Surrogate& source, const Eigen::MatrixXd& target_inputs,
                         const Eigen::VectorXd& target_values) {
    Eigen::VectorXd preds(target_inputs.rows());
    for (Eigen::Index i = 0; i < target_inputs.rows(); ++i)
        preds(i) = source.predict(target_inputs.row(i).transpose()).mean;
    return fit_transfer(preds, target_values);
}

double discordant_tau(const Eigen::VectorXd& source_predictions, const Eigen::VectorXd& target_values) {
    const auto n = source_predictions.size();
    if (n < 2 || target_values.size() != n) throw std::invalid_argument("discordant_tau needs n >= 2 matching values");
    long count = 0;
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index k = 1; k < n; ++k) {
            const bool s = source_predictions(m) < source_predictions(k);
            const bool t = target_values(m) < target_values(k);
            count += (s != t) ? 1 : 0;
        }
    }
    return static_cast<double>(count) / static_cast<double>(n);
}

double discordant_tau_max(std::size_t n) {
    if (n < 2) return 0.0;
    const double m = static_cast<double>(n) - 1.0;
    return m * m / static_cast<double>(n);
}

double epanechnikov(double tau, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("epanechnikov bandwidth must be positive");
    const double t = tau / rho;
    return t <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0;
}

double accuracy_tau(const Eigen::VectorXd& source_predictions, const Eigen::VectorXd& target_values, double eps_max) {
    const auto n = source_predictions.size();
    if (n < 1 || target_values.size() != n) throw std::invalid_argument("accuracy_tau needs matching nonempty vectors");
    int violators = 0;
    for (Eigen::Index m = 0; m < n; ++m) {
        const double err = std::abs(source_predictions(m) - target_values(m));
        const double denom = std::abs(target_values(m));
        const double rel = denom < 1e-12 ? err : err / denom;
        if (rel > eps_max) ++violators;
    }
    return static_cast<double>(violators) / static_cast<double>(n);
}

double variance_tau(const Eigen::VectorXd& source_sds, const Eigen::VectorXd& target_values, double sigma_max) {
    const auto n = source_sds.size();
    if (n < 1 || target_values.size() != n) throw std::invalid_argument("variance_tau needs matching nonempty vectors");
    const double y_max = target_values.cwiseAbs().maxCoeff();
    if (y_max == 0.0) {
        spdlog::warn("variance criterion: all target outputs are zero, no scale to compare against");
        return 0.0;
    }
    int violators = 0;
    for (Eigen::Index m = 0; m < n; ++m)
        if (source_sds(m) / y_max > sigma_max) ++violators;
    return static_cast<double>(violators) / static_cast<double>(n);
}

CriteriaConfig CriteriaConfig::preset(SurrogateRole role) {
    CriteriaConfig c;
    if (role == SurrogateRole::constraint) {
        c.w_shape = c.w_accuracy = c.w_variance = 1.0 / 3.0;
    }
    return c;
}

void CriteriaConfig::validate() const {
    if (w_shape < 0 || w_accuracy < 0 || w_variance < 0) throw std::invalid_argument("criteria weights must be >= 0");
    if (std::abs(w_shape + w_accuracy + w_variance - 1.0) > 1e-9)
        throw std::invalid_argument("criteria weights must sum to 1");
    if (!(rho_shape > 0 && rho_accuracy > 0 && rho_variance > 0))
        throw std::invalid_argument("criteria bandwidths must be positive");
    if (!(eps_max > 0 && sigma_max > 0)) throw std::invalid_argument("eps_max and sigma_max must be positive");
}

CriteriaScores score_criteria(const Eigen::VectorXd& raw_predictions, const Eigen::VectorXd& adjusted_predictions,
                              const Eigen::VectorXd& adjusted_sds, const Eigen::VectorXd& target_values,
                              const CriteriaConfig& config) {
    CriteriaScores s;
    s.tau_shape = target_values.size() >= 2 ? discordant_tau(raw_predictions, target_values) : 0.0;
    s.tau_accuracy = accuracy_tau(adjusted_predictions, target_values, config.eps_max);
    s.tau_variance = variance_tau(adjusted_sds, target_values, config.sigma_max);
    // the raw tau reaches (n-1)^2/n for a full reversal; the bandwidth is relative to that
    s.c_shape = target_values.size() >= 2
                    ? epanechnikov(s.tau_shape / discordant_tau_max(static_cast<std::size_t>(target_values.size())),
                                   config.rho_shape)
                    : 0.0;
    s.c_accuracy = epanechnikov(s.tau_accuracy, config.rho_accuracy);
    s.c_variance = epanechnikov(s.tau_variance, config.rho_variance);
    s.score = config.w_shape * s.c_shape + config.w_accuracy * s.c_accuracy + config.w_variance * s.c_variance;
    return s;
}

ProbabilityWeights probabilities_from_scores(const std::vector<double>& scores) {
    ProbabilityWeights out;
    if (scores.empty()) return out;
    double total = 0.0;
    for (double s : scores) {
        if (s < 0 || !std::isfinite(s)) throw std::invalid_argument("criteria scores must be finite and >= 0");
        total += s;
    }
    out.probabilities.resize(scores.size());
    if (total <= 0.0) {
        out.informative = false;
        for (auto& p : out.probabilities) p = 1.0 / static_cast<double>(scores.size());
        return out;
    }
    for (std::size_t j = 0; j < scores.size(); ++j) out.probabilities[j] = scores[j] / total;
    return out;
}

} // namespace xferbo
