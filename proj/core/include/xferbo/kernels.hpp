#pragma once

#include <variant>

#include <Eigen/Dense>

namespace xferbo {

/// Squared-exponential kernel: variance * prod_d exp(-(x_d - x2_d)^2 / (2 l_d)).
struct SeKernelParams {
    double variance = 1.0;
    Eigen::VectorXd length_scales;
};

/// KPLS kernel: variance * prod_l exp(-theta_l * sum_d (w_ld x_d - w_ld x2_d)^2).
/// `weights` is h x D; a variable whose column is all zero does not influence the kernel.
struct KplsParams {
    Eigen::MatrixXd weights;
    Eigen::VectorXd thetas;
    double variance = 1.0;

    Eigen::Index n_components() const { return weights.rows(); }
};

using KernelParams = std::variant<SeKernelParams, KplsParams>;

enum class KernelKind { se, kpls };

/// Throws std::invalid_argument unless every hyperparameter is finite and strictly positive
/// and the shapes agree with `dim`.
void validate_kernel(const KernelParams& params, Eigen::Index dim);

double se_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const SeKernelParams& params);
double kpls_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const KplsParams& params);
double kernel_value(const KernelParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& x2);

KernelKind kernel_kind(const KernelParams& params);
double kernel_variance(const KernelParams& params);
KernelParams with_variance(KernelParams params, double variance);

/// Both kernels are separable exponentials, k = variance * exp(-sum_d c_d (x_d - x2_d)^2).
/// Returns c (length D). For KPLS, c_d = sum_l theta_l w_ld^2, exactly 0 for masked variables.
Eigen::VectorXd ard_coefficients(const KernelParams& params);

/// Unit-variance correlation exp(-sum_d c_d (a_d - b_d)^2).
double ard_correlation(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                       const Eigen::VectorXd& coefficients);

/// N x N correlation matrix of the rows of `points` (no nugget).
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& points, const Eigen::VectorXd& coefficients);

/// Correlations between x and each row of `points`.
Eigen::VectorXd correlation_vector(const Eigen::MatrixXd& points, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& coefficients);

} // namespace xferbo
