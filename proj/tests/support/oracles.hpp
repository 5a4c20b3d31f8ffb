#pragma once

// Independent reference implementations used by the unit and acceptance tests. They share no
// code with the library beyond reading a trained model's parameters.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "xferbo/gp.hpp"
#include "xferbo/kernels.hpp"

namespace oracle {

using LMat = std::vector<std::vector<long double>>;

/// Literal kernel formulas on normalized inputs.
inline long double kernel(const xferbo::KernelParams& params, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (const auto* se = std::get_if<xferbo::SeKernelParams>(&params)) {
        long double prod = se->variance;
        for (Eigen::Index d = 0; d < a.size(); ++d) {
            const long double diff = static_cast<long double>(a(d)) - b(d);
            prod *= std::exp(-diff * diff / (2.0L * se->length_scales(d)));
        }
        return prod;
    }
    const auto& k = std::get<xferbo::KplsParams>(params);
    long double prod = k.variance;
    for (Eigen::Index l = 0; l < k.weights.rows(); ++l) {
        long double s = 0.0L;
        for (Eigen::Index d = 0; d < a.size(); ++d) {
            const long double diff = static_cast<long double>(k.weights(l, d)) * a(d) -
                                     static_cast<long double>(k.weights(l, d)) * b(d);
            s += diff * diff;
        }
        prod *= std::exp(-static_cast<long double>(k.thetas(l)) * s);
    }
    return prod;
}

/// Gauss-Jordan inverse with partial pivoting; also returns ln|det|.
inline LMat invert(LMat a, long double& log_det) {
    const std::size_t n = a.size();
    LMat inv(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
    log_det = 0.0L;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        const long double piv = a[c][c];
        log_det += std::log(std::fabs(piv));
        for (std::size_t k = 0; k < n; ++k) {
            a[c][k] /= piv;
            inv[c][k] /= piv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const long double f = a[r][c];
            if (f == 0.0L) continue;
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

/// Dense-inverse GP predictor rebuilt from a trained model's normalized data and parameters.
class DenseGp {
public:
    explicit DenseGp(const xferbo::GpModel& m)
        : model_(m), xn_(m.normalized_inputs()), ys_(m.standardized_outputs()) {
        const std::size_t n = static_cast<std::size_t>(xn_.rows());
        const long double s2 = m.process_variance();
        LMat k(n, std::vector<long double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                k[i][j] = kernel(m.kernel(), xn_.row(static_cast<Eigen::Index>(i)).transpose(),
                                 xn_.row(static_cast<Eigen::Index>(j)).transpose());
                if (i == j) k[i][j] += s2 * m.nugget();
            }
        Eigen::MatrixXd kd(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) kd(i, j) = static_cast<double>(k[i][j]);
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(kd).singularValues();
        condition_ = sv(0) / sv(sv.size() - 1);
        kinv_ = invert(k, log_det_);
        k_ = std::move(k);
        resid_.resize(n);
        for (std::size_t i = 0; i < n; ++i) resid_[i] = ys_(static_cast<Eigen::Index>(i)) - m.mean_bias();
        w_ = solve(resid_);
    }

    /// Raw-unit mean and variance.
    std::pair<long double, long double> predict(const Eigen::VectorXd& x) const {
        const auto& norm = model_.normalization();
        Eigen::VectorXd xn(x.size());
        for (Eigen::Index d = 0; d < x.size(); ++d) xn(d) = (x(d) - norm.lower(d)) / norm.width(d);
        const std::size_t n = w_.size();
        std::vector<long double> kx(n);
        for (std::size_t i = 0; i < n; ++i)
            kx[i] = kernel(model_.kernel(), xn, xn_.row(static_cast<Eigen::Index>(i)).transpose());
        const std::vector<long double> wx = solve(kx);
        long double mean = model_.mean_bias(), quad = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            mean += kx[i] * w_[i];
            quad += kx[i] * wx[i];
        }
        long double var = kernel(model_.kernel(), xn, xn) - quad;
        if (var < 0) var = 0;
        const long double scale = norm.y_scale;
        return {norm.y_mean + scale * mean, scale * scale * var};
    }

    /// 2-norm condition number of the covariance matrix.
    double condition() const { return condition_; }

    /// log N(ys | mean_bias, K) in standardized units.
    long double log_ml() const {
        const std::size_t n = w_.size();
        long double quad = 0.0L;
        for (std::size_t i = 0; i < n; ++i) quad += resid_[i] * w_[i];
        return -0.5L * (static_cast<long double>(n) * std::log(2.0L * 3.14159265358979323846264338327950288L) +
                        log_det_ + quad);
    }

private:
    /// K^-1 b with two rounds of residual refinement against K.
    std::vector<long double> solve(const std::vector<long double>& b) const {
        const std::size_t n = b.size();
        std::vector<long double> x(n, 0.0L), r = b;
        for (int round = 0; round < 3; ++round) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) x[i] += kinv_[i][j] * r[j];
            for (std::size_t i = 0; i < n; ++i) {
                r[i] = b[i];
                for (std::size_t j = 0; j < n; ++j) r[i] -= k_[i][j] * x[j];
            }
        }
        return x;
    }

    const xferbo::GpModel& model_;
    Eigen::MatrixXd xn_;
    Eigen::VectorXd ys_;
    LMat k_, kinv_;
    std::vector<long double> resid_, w_;
    double condition_ = 1.0;
    long double log_det_ = 0.0L;
};

/// Discordance count by a plain double loop.
inline double discordant(const std::vector<double>& s, const std::vector<double>& t) {
    const std::size_t n = s.size();
    long count = 0;
    for (std::size_t m = 1; m <= n; ++m)
        for (std::size_t k = 2; k <= n; ++k) {
            const bool a = s[m - 1] < s[k - 1];
            const bool b = t[m - 1] < t[k - 1];
            if (a != b) ++count;
        }
    return static_cast<double>(count) / static_cast<double>(n);
}

/// Monte-Carlo E[max(y_min - Y, 0)], Y ~ N(mean, sd^2).
inline double monte_carlo_ei(double mean, double sd, double y_min, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < samples; ++i) {
        const double y = mean + sd * normal(gen);
        if (y < y_min) sum += y_min - y;
    }
    return static_cast<double>(sum / static_cast<long double>(samples));
}

/// Standard normal draws by stratified sampling: one jittered draw per equal-probability stratum,
/// mapped through the normal quantile (bisection on erfc, so no library inverse is involved).
inline std::vector<double> stratified_normal_draws(std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    std::vector<double> z(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double u = (static_cast<double>(i) + jitter(gen)) / static_cast<double>(samples);
        double lo = -40.0, hi = 40.0;
        while (hi - lo > 1e-13) {
            const double mid = 0.5 * (lo + hi);
            (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u ? lo : hi) = mid;
        }
        z[i] = 0.5 * (lo + hi);
    }
    return z;
}

/// Sample mean of max(y_min - (mean + sd z), 0).
inline double ei_from_draws(double mean, double sd, double y_min, const std::vector<double>& z) {
    long double sum = 0.0L;
    for (double v : z) {
        const double y = mean + sd * v;
        if (y < y_min) sum += y_min - y;
    }
    return static_cast<double>(sum / static_cast<long double>(z.size()));
}

/// Smallest MSE of alpha * s + beta against t over a uniform grid on [lo, hi]^2.
inline double grid_transfer_mse(const std::vector<double>& s, const std::vector<double>& t, int steps = 201,
                                double lo = -5.0, double hi = 5.0) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < steps; ++i) {
        const double a = lo + (hi - lo) * i / (steps - 1);
        for (int j = 0; j < steps; ++j) {
            const double b = lo + (hi - lo) * j / (steps - 1);
            double mse = 0.0;
            for (std::size_t k = 0; k < s.size(); ++k) {
                const double e = a * s[k] + b - t[k];
                mse += e * e;
            }
            best = std::min(best, mse / static_cast<double>(s.size()));
        }
    }
    return best;
}

} // namespace oracle
