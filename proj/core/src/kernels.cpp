#include "xferbo/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace xferbo {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require_same_size(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, Eigen::Index dim) {
    if (x.size() != dim || x2.size() != dim)
        throw std::invalid_argument("kernel inputs must have length " + std::to_string(dim));
    if (!x.allFinite() || !x2.allFinite()) throw std::invalid_argument("kernel inputs must be finite");
}

} // namespace

void validate_kernel(const KernelParams& params, Eigen::Index dim) {
    if (const auto* se = std::get_if<SeKernelParams>(&params)) {
        if (!positive_finite(se->variance)) throw std::invalid_argument("SE variance must be positive");
        if (se->length_scales.size() != dim) throw std::invalid_argument("SE length-scale count mismatch");
        for (Eigen::Index d = 0; d < dim; ++d)
            if (!positive_finite(se->length_scales(d))) throw std::invalid_argument("SE length scales must be positive");
        return;
    }
    const auto& kp = std::get<KplsParams>(params);
    if (!positive_finite(kp.variance)) throw std::invalid_argument("KPLS variance must be positive");
    if (kp.weights.cols() != dim) throw std::invalid_argument("KPLS weight columns must equal the dimension");
    if (kp.weights.rows() < 1 || kp.weights.rows() > dim)
        throw std::invalid_argument("KPLS needs 1 <= components <= dimension");
    if (kp.thetas.size() != kp.weights.rows()) throw std::invalid_argument("KPLS theta count mismatch");
    if (!kp.weights.allFinite()) throw std::invalid_argument("KPLS weights must be finite");
    for (Eigen::Index l = 0; l < kp.thetas.size(); ++l)
        if (!positive_finite(kp.thetas(l))) throw std::invalid_argument("KPLS thetas must be positive");
}

double se_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const SeKernelParams& params) {
    validate_kernel(params, params.length_scales.size());
    require_same_size(x, x2, params.length_scales.size());
    double value = params.variance;
    for (Eigen::Index d = 0; d < x.size(); ++d) {
        const double diff = x(d) - x2(d);
        value *= std::exp(-diff * diff / (2.0 * params.length_scales(d)));
    }
    return value;
}

double kpls_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const KplsParams& params) {
    validate_kernel(params, params.weights.cols());
    require_same_size(x, x2, params.weights.cols());
    double value = params.variance;
    for (Eigen::Index l = 0; l < params.n_components(); ++l) {
        double sum = 0.0;
        for (Eigen::Index d = 0; d < x.size(); ++d) {
            const double diff = params.weights(l, d) * x(d) - params.weights(l, d) * x2(d);
            sum += diff * diff;
        }
        value *= std::exp(-params.thetas(l) * sum);
    }
    return value;
}

double kernel_value(const KernelParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& x2) {
    return std::visit(
        [&](const auto& p) {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, SeKernelParams>)
                return se_kernel(x, x2, p);
            else
                return kpls_kernel(x, x2, p);
        },
        params);
}

KernelKind kernel_kind(const KernelParams& params) {
    return std::holds_alternative<SeKernelParams>(params) ? KernelKind::se : KernelKind::kpls;
}

double kernel_variance(const KernelParams& params) {
    return std::visit([](const auto& p) { return p.variance; }, params);
}

KernelParams with_variance(KernelParams params, double variance) {
    std::visit([variance](auto& p) { p.variance = variance; }, params);
    return params;
}

Eigen::VectorXd ard_coefficients(const KernelParams& params) {
    if (const auto* se = std::get_if<SeKernelParams>(&params)) return (0.5 / se->length_scales.array()).matrix();
    const auto& kp = std::get<KplsParams>(params);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(kp.weights.cols());
    for (Eigen::Index l = 0; l < kp.n_components(); ++l)
        for (Eigen::Index d = 0; d < kp.weights.cols(); ++d)
            c(d) += kp.thetas(l) * kp.weights(l, d) * kp.weights(l, d);
    return c;
}

double ard_correlation(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                       const Eigen::VectorXd& coefficients) {
    double s = 0.0;
    for (Eigen::Index d = 0; d < coefficients.size(); ++d) {
        const double diff = a(d) - b(d);
        s += coefficients(d) * diff * diff;
    }
    return std::exp(-s);
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& points, const Eigen::VectorXd& coefficients) {
    const Eigen::Index n = points.rows();
    const Eigen::Index dim = points.cols();
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            double s = 0.0;
            for (Eigen::Index d = 0; d < dim; ++d) {
                const double diff = points(i, d) - points(j, d);
                s += coefficients(d) * diff * diff;
            }
            r(i, j) = r(j, i) = std::exp(-s);
        }
    }
    return r;
}

Eigen::VectorXd correlation_vector(const Eigen::MatrixXd& points, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& coefficients) {
    const Eigen::Index n = points.rows();
    const Eigen::Index dim = points.cols();
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Eigen::Index d = 0; d < dim; ++d) {
            const double diff = points(i, d) - x(d);
            s += coefficients(d) * diff * diff;
        }
        r(i) = std::exp(-s);
    }
    return r;
}

} // namespace xferbo
