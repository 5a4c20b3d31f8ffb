#include "xferbo/kpls.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "gp_detail.hpp"
#include "xferbo/random.hpp"

namespace xferbo {

namespace {

std::vector<Eigen::Index> active_columns(Eigen::Index dim, const std::vector<bool>& mask) {
    if (!mask.empty() && static_cast<Eigen::Index>(mask.size()) != dim)
        throw std::invalid_argument("mask length does not match the input dimension");
    std::vector<Eigen::Index> active;
    for (Eigen::Index d = 0; d < dim; ++d)
        if (mask.empty() || !mask[static_cast<std::size_t>(d)]) active.push_back(d);
    if (active.empty()) throw std::invalid_argument("every variable is masked");
    return active;
}

int resolve_components(int requested, std::size_t active) {
    const int cap = static_cast<int>(active);
    return requested > 0 ? std::min(requested, cap) : std::min(4, cap);
}

} // namespace

PlsWeights pls_weights(const Eigen::MatrixXd& points, const Eigen::VectorXd& y, int max_components,
                       const std::vector<bool>& mask) {
    if (y.size() != points.rows()) throw std::invalid_argument("output length does not match point count");
    const Eigen::Index dim = points.cols();
    const auto active = active_columns(dim, mask);
    const auto da = static_cast<Eigen::Index>(active.size());
    const int h_max = resolve_components(max_components, active.size());

    Eigen::MatrixXd x(points.rows(), da);
    for (Eigen::Index j = 0; j < da; ++j) x.col(j) = points.col(active[static_cast<std::size_t>(j)]);
    x.rowwise() -= x.colwise().mean();
    Eigen::VectorXd yc = (y.array() - y.mean()).matrix();

    Eigen::MatrixXd w_all(da, h_max), p_all(da, h_max);
    int h = 0;
    double first_norm = 0.0;
    for (; h < h_max; ++h) {
        Eigen::VectorXd w = x.transpose() * yc;
        const double wn = w.norm();
        if (h == 0) first_norm = wn;
        if (!(wn > 1e-12) || (h > 0 && wn <= 1e-10 * first_norm)) break;
        w /= wn;
        const Eigen::VectorXd t = x * w;
        const double tt = t.squaredNorm();
        if (!(tt > 1e-300)) break;
        const Eigen::VectorXd p = x.transpose() * t / tt;
        const double c = yc.dot(t) / tt;
        x -= t * p.transpose();
        yc -= c * t;
        w_all.col(h) = w;
        p_all.col(h) = p;
    }

    PlsWeights out;
    if (h == 0) {
        out.degenerate = true;
        out.weights = Eigen::MatrixXd::Zero(1, dim);
        for (auto j : active) out.weights(0, j) = 1.0 / std::sqrt(static_cast<double>(da));
        return out;
    }
    const Eigen::MatrixXd w = w_all.leftCols(h);
    const Eigen::MatrixXd ptw = p_all.leftCols(h).transpose() * w;
    const Eigen::MatrixXd rot = w * ptw.inverse();  // W* = W (P^T W)^-1, da x h
    out.weights = Eigen::MatrixXd::Zero(h, dim);
    for (int l = 0; l < h; ++l) {
        const double n = rot.col(l).norm();
        for (Eigen::Index j = 0; j < da; ++j) out.weights(l, active[static_cast<std::size_t>(j)]) = rot(j, l) / n;
    }
    return out;
}

namespace detail {

GpTrainingResult train_kpls(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                            std::span<const VariableMeta> bounds, const GpConfig& config, const std::vector<bool>& mask,
                            KplsFit* fit_out) {
    if (inputs.rows() < 3) throw std::invalid_argument("KPLS training needs N >= 3");
    auto norm = Normalization::fit(bounds, outputs);
    const Eigen::MatrixXd xn = norm.normalize_rows(inputs);
    const Eigen::VectorXd ys = ((outputs.array() - norm.y_mean) / norm.y_scale).matrix();
    const auto pls = pls_weights(xn, ys, config.kpls_max_components, mask);
    if (pls.degenerate) spdlog::warn("KPLS: output has no covariance with the inputs; using uniform weights");

    KplsFit fit;
    fit.degenerate = pls.degenerate;
    std::optional<GpTrainingResult> best;
    double best_err = std::numeric_limits<double>::infinity();
    for (Eigen::Index h = 1; h <= pls.weights.rows(); ++h) {
        const Eigen::MatrixXd w = pls.weights.topRows(h);
        auto coefficients = [&w](const Eigen::VectorXd& log_theta) {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(w.cols());
            for (Eigen::Index l = 0; l < w.rows(); ++l) {
                const double theta = std::exp(log_theta(l));
                for (Eigen::Index d = 0; d < w.cols(); ++d) c(d) += theta * w(l, d) * w(l, d);
            }
            return c;
        };
        GpConfig cfg = config;
        cfg.seed = derive_seed(config.seed, "kpls_components", static_cast<std::uint64_t>(h));
        auto search = search_hyperparameters(xn, ys, static_cast<int>(h), coefficients, cfg);
        KplsParams params{w, search.best_log_hyper.array().exp().matrix(), search.best.variance};
        GpModel model(inputs, outputs, norm, params, search.best.mean_bias, search.best.nugget, config.max_nugget);
        const double err = loo_mse(model);
        fit.loo_errors.push_back(err);
        if (!best || err < best_err) {
            best_err = err;
            best.emplace(GpTrainingResult{std::move(model), std::move(search.starts), search.best_start});
            fit.n_components = static_cast<int>(h);
            fit.weights = w;
        }
    }
    if (fit_out) *fit_out = fit;
    return std::move(*best);
}

} // namespace detail

KplsFit fit_kpls_weights(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                         std::span<const VariableMeta> bounds, int max_components, const GpConfig& config,
                         const std::vector<bool>& mask) {
    GpConfig cfg = config;
    cfg.kpls_max_components = max_components;
    KplsFit fit;
    detail::train_kpls(inputs, outputs, bounds, cfg, mask, &fit);
    return fit;
}

} // namespace xferbo
