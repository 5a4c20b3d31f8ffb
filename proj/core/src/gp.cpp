#include "xferbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gp_detail.hpp"
#include "xferbo/errors.hpp"
#include "xferbo/nelder_mead.hpp"
#include "xferbo/random.hpp"

namespace xferbo {

namespace {

struct Factor {
    Eigen::MatrixXd lower;
    double nugget;
};

std::optional<Factor> factorize(const Eigen::MatrixXd& r, double nugget, double max_nugget) {
    const Eigen::Index n = r.rows();
    double nu = nugget;
    while (true) {
        Eigen::MatrixXd a = r;
        a.diagonal().array() += nu;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd l = llt.matrixL();
            bool ok = true;
            for (Eigen::Index i = 0; i < n; ++i)
                if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) ok = false;
            if (ok) return Factor{std::move(l), nu};
        }
        if (nu >= max_nugget) return std::nullopt;
        nu = std::min(nu * 10.0, max_nugget);
    }
}

Eigen::VectorXd chol_solve(const Eigen::MatrixXd& l, const Eigen::VectorXd& b) {
    Eigen::VectorXd z = l.triangularView<Eigen::Lower>().solve(b);
    return l.transpose().triangularView<Eigen::Upper>().solve(z);
}

double log_det_from_factor(const Eigen::MatrixXd& l) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

Eigen::VectorXd as_vector(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json to_json_vector(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json to_json_matrix(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json_vector(m.row(i).transpose()));
    return rows;
}

Eigen::MatrixXd as_matrix(const nlohmann::json& j, Eigen::Index cols_hint = -1) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : std::max<Eigen::Index>(cols_hint, 0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols) throw ConfigError("ragged matrix in model document");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    return m;
}

} // namespace

Normalization Normalization::fit(std::span<const VariableMeta> bounds, const Eigen::VectorXd& outputs) {
    Normalization n;
    const auto d = static_cast<Eigen::Index>(bounds.size());
    n.lower.resize(d);
    n.width.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        n.lower(i) = bounds[static_cast<std::size_t>(i)].lower;
        n.width(i) = bounds[static_cast<std::size_t>(i)].width();
    }
    if (outputs.size() > 0) {
        n.y_mean = outputs.mean();
        const double var = (outputs.array() - n.y_mean).square().mean();
        const double sd = std::sqrt(var);
        n.y_scale = sd > 1e-12 * (1.0 + std::abs(n.y_mean)) ? sd : 1.0;
    }
    return n;
}

Eigen::VectorXd Normalization::normalize(const Eigen::VectorXd& x) const {
    return ((x - lower).array() / width.array()).matrix();
}

Eigen::MatrixXd Normalization::normalize_rows(const Eigen::MatrixXd& inputs) const {
    Eigen::MatrixXd out(inputs.rows(), inputs.cols());
    for (Eigen::Index i = 0; i < inputs.rows(); ++i)
        out.row(i) = ((inputs.row(i).transpose() - lower).array() / width.array()).matrix().transpose();
    return out;
}

ProfiledLikelihood profile_likelihood(const Eigen::MatrixXd& points, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& coefficients, double nugget, double max_nugget) {
    const auto n = points.rows();
    const auto factor = factorize(correlation_matrix(points, coefficients), nugget, max_nugget);
    if (!factor) throw TrainingError("correlation matrix is not positive definite at the maximum nugget");
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd rinv_y = chol_solve(factor->lower, y);
    const Eigen::VectorXd rinv_1 = chol_solve(factor->lower, ones);
    ProfiledLikelihood out;
    out.nugget = factor->nugget;
    out.mean_bias = ones.dot(rinv_y) / ones.dot(rinv_1);
    const Eigen::VectorXd resid = y - ones * out.mean_bias;
    double quad = resid.dot(rinv_y - rinv_1 * out.mean_bias);
    if (n == 1) {
        // One point carries no information on the scale; keep the standardized prior.
        out.variance = 1.0;
    } else {
        out.variance = std::max(quad / static_cast<double>(n), 1e-12);
    }
    const double logdet = log_det_from_factor(factor->lower);
    out.log_ml = -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi * out.variance) + logdet +
                         quad / out.variance);
    return out;
}

double log_marginal_likelihood(const Eigen::MatrixXd& points, const Eigen::VectorXd& y, const KernelParams& params,
                               double mean_bias, double nugget, double max_nugget) {
    validate_kernel(params, points.cols());
    if (y.size() != points.rows()) throw std::invalid_argument("output length does not match point count");
    const auto factor = factorize(correlation_matrix(points, ard_coefficients(params)), nugget, max_nugget);
    if (!factor) throw TrainingError("correlation matrix is not positive definite at the maximum nugget");
    const double s2 = kernel_variance(params);
    const Eigen::VectorXd resid = (y.array() - mean_bias).matrix();
    const Eigen::VectorXd z = factor->lower.triangularView<Eigen::Lower>().solve(resid);
    const auto n = static_cast<double>(points.rows());
    return -0.5 * (n * std::log(2.0 * std::numbers::pi * s2) + log_det_from_factor(factor->lower) +
                   z.squaredNorm() / s2);
}

GpModel::GpModel(Eigen::MatrixXd inputs, Eigen::VectorXd outputs, Normalization normalization, KernelParams params,
                 double mean_bias, double nugget, double max_nugget)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      norm_(std::move(normalization)),
      params_(std::move(params)),
      mean_bias_(mean_bias) {
    if (inputs_.rows() < 1) throw std::invalid_argument("a GP needs at least one training point");
    if (outputs_.size() != inputs_.rows()) throw std::invalid_argument("output length does not match inputs");
    if (norm_.lower.size() != inputs_.cols() || norm_.width.size() != inputs_.cols())
        throw std::invalid_argument("normalization dimension mismatch");
    validate_kernel(params_, inputs_.cols());
    xn_ = norm_.normalize_rows(inputs_);
    ys_ = ((outputs_.array() - norm_.y_mean) / norm_.y_scale).matrix();
    coefficients_ = ard_coefficients(params_);
    // the double factorization settles the nugget exactly as during training
    auto factor = factorize(correlation_matrix(xn_, coefficients_), nugget, max_nugget);
    if (!factor) throw TrainingError("correlation matrix is not positive definite at the maximum nugget");
    nugget_ = factor->nugget;
    const Eigen::Index n = xn_.rows();
    LMatrix r(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r.col(i) = correlations_to(xn_.row(i).transpose());
        r(i, i) += nugget_;
    }
    Eigen::LLT<LMatrix> llt(r);
    if (llt.info() != Eigen::Success)
        throw TrainingError("correlation matrix is not positive definite at the maximum nugget");
    chol_ = llt.matrixL();
    const LVector resid = (ys_.array() - mean_bias_).matrix().cast<long double>();
    alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(chol_.triangularView<Eigen::Lower>().solve(resid));
}

GpModel::LVector GpModel::correlations_to(const Eigen::VectorXd& xn) const {
    const Eigen::Index n = xn_.rows();
    LVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        long double q = 0.0L;
        for (Eigen::Index d = 0; d < xn.size(); ++d) {
            const long double diff = static_cast<long double>(xn_(i, d)) - xn(d);
            q += coefficients_(d) * diff * diff;
        }
        out(i) = std::exp(-q);
    }
    return out;
}

Prediction GpModel::predict(const Eigen::VectorXd& x) const {
    if (x.size() != inputs_.cols()) throw std::invalid_argument("prediction input has the wrong dimension");
    const LVector r = correlations_to(norm_.normalize(x));
    const auto mean_s = static_cast<double>(mean_bias_ + r.dot(alpha_));
    const LVector v = chol_.triangularView<Eigen::Lower>().solve(r);
    const auto var_s = static_cast<double>(process_variance() * (1.0L - v.squaredNorm()));
    return {norm_.y_mean + norm_.y_scale * mean_s, norm_.y_scale * std::sqrt(std::max(0.0, var_s))};
}

double GpModel::log_marginal_likelihood() const {
    const long double s2 = process_variance();
    const LVector z = chol_.triangularView<Eigen::Lower>().solve((ys_.array() - mean_bias_).matrix().cast<long double>());
    const auto n = static_cast<long double>(xn_.rows());
    long double log_det = 0.0L;
    for (Eigen::Index i = 0; i < chol_.rows(); ++i) log_det += 2.0L * std::log(chol_(i, i));
    return static_cast<double>(-0.5L * (n * std::log(2.0L * std::numbers::pi_v<long double> * s2) + log_det +
                                        z.squaredNorm() / s2));
}

LooPredictions GpModel::leave_one_out() const {
    const auto n = xn_.rows();
    const LMatrix linv = chol_.triangularView<Eigen::Lower>().solve(LMatrix::Identity(n, n));
    const LVector diag_ld = linv.colwise().squaredNorm().transpose();  // diag of R^-1
    const Eigen::VectorXd diag = diag_ld.cast<double>();
    LooPredictions out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto resid = static_cast<double>(alpha_(i) / diag_ld(i));
        out.mean(i) = norm_.y_mean + norm_.y_scale * (ys_(i) - resid);
        out.sd(i) = norm_.y_scale * std::sqrt(std::max(0.0, process_variance() / diag(i)));
    }
    return out;
}

nlohmann::json GpModel::to_json() const {
    nlohmann::json doc;
    doc["format"] = "xferbo-gp";
    doc["version"] = 1;
    if (const auto* se = std::get_if<SeKernelParams>(&params_)) {
        doc["kernel"] = {{"kind", "se"}, {"variance", se->variance}, {"length_scales", to_json_vector(se->length_scales)}};
    } else {
        const auto& kp = std::get<KplsParams>(params_);
        doc["kernel"] = {{"kind", "kpls"},
                         {"variance", kp.variance},
                         {"thetas", to_json_vector(kp.thetas)},
                         {"weights", to_json_matrix(kp.weights)}};
    }
    doc["mean_bias"] = mean_bias_;
    doc["nugget"] = nugget_;
    doc["normalization"] = {{"lower", to_json_vector(norm_.lower)},
                            {"width", to_json_vector(norm_.width)},
                            {"y_mean", norm_.y_mean},
                            {"y_scale", norm_.y_scale}};
    doc["training"] = {{"inputs", to_json_matrix(inputs_)}, {"outputs", to_json_vector(outputs_)}};
    return doc;
}

GpModel GpModel::from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "xferbo-gp") throw ConfigError("not an xferbo GP document");
        const auto& k = doc.at("kernel");
        const auto kind = k.at("kind").get<std::string>();
        KernelParams params;
        if (kind == "se") {
            params = SeKernelParams{k.at("variance").get<double>(), as_vector(k.at("length_scales"))};
        } else if (kind == "kpls") {
            params = KplsParams{as_matrix(k.at("weights")), as_vector(k.at("thetas")), k.at("variance").get<double>()};
        } else {
            throw ConfigError("unknown kernel kind '" + kind + "'");
        }
        Normalization norm;
        const auto& nj = doc.at("normalization");
        norm.lower = as_vector(nj.at("lower"));
        norm.width = as_vector(nj.at("width"));
        norm.y_mean = nj.at("y_mean").get<double>();
        norm.y_scale = nj.at("y_scale").get<double>();
        const auto& t = doc.at("training");
        const double nugget = doc.at("nugget").get<double>();
        return GpModel(as_matrix(t.at("inputs"), norm.lower.size()), as_vector(t.at("outputs")), std::move(norm),
                       std::move(params), doc.at("mean_bias").get<double>(), nugget, nugget);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed GP document: ") + e.what());
    }
}

namespace detail {

HyperSearch search_hyperparameters(const Eigen::MatrixXd& xn, const Eigen::VectorXd& ys, int n_params,
                                   const CoefficientMap& coefficients, const GpConfig& config) {
    const double lo = config.log_hyper_lower, hi = config.log_hyper_upper;
    const int n_starts = std::max(1, config.n_starts);
    const int budget = config.max_evaluations_per_start > 0 ? config.max_evaluations_per_start : 30 * (n_params + 1);

    auto clamp = [&](const Eigen::VectorXd& v) { return v.cwiseMax(lo).cwiseMin(hi).eval(); };
    auto evaluate = [&](const Eigen::VectorXd& log_hyper) -> std::optional<ProfiledLikelihood> {
        try {
            return profile_likelihood(xn, ys, coefficients(log_hyper), config.nugget, config.max_nugget);
        } catch (const TrainingError&) {
            return std::nullopt;
        }
    };

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(Eigen::VectorXd::Constant(n_params, 0.5 * (lo + hi)));
    if (n_starts > 1) {
        std::vector<VariableMeta> box;
        for (int i = 0; i < n_params; ++i) box.push_back({"h" + std::to_string(i), lo, hi});
        const Eigen::MatrixXd pts = lhs_sample(box, static_cast<std::size_t>(n_starts - 1),
                                               derive_seed(config.seed, "gp_starts"));
        for (Eigen::Index i = 0; i < pts.rows(); ++i) starts.push_back(pts.row(i).transpose());
    }

    HyperSearch out;
    double best_value = -std::numeric_limits<double>::infinity();
    bool found = false;
    NelderMeadOptions opts;
    opts.max_evaluations = budget;
    opts.initial_step = 0.15 * (hi - lo);
    opts.f_tolerance = 1e-7;
    opts.x_tolerance = 1e-4;

    for (std::size_t s = 0; s < starts.size(); ++s) {

        auto objective = [&](const Eigen::VectorXd& v) {
            const Eigen::VectorXd c = clamp(v);
            const double penalty = 1e3 * (v - c).squaredNorm();
            auto p = evaluate(c);
            return p ? -p->log_ml + penalty : std::numeric_limits<double>::infinity();
        };
        const auto res = nelder_mead(objective, starts[s], opts);
        const Eigen::VectorXd theta = clamp(res.x);
        auto p = evaluate(theta);
        out.starts.push_back({starts[s], theta, p ? p->log_ml : -std::numeric_limits<double>::infinity()});
        if (!p) continue;
        if (!found || p->log_ml > best_value) {
            found = true;
            best_value = p->log_ml;
            out.best_start = s;
            out.best_log_hyper = theta;
            out.best = *p;
        }
    }
    if (!found)
        throw TrainingError("hyperparameter search failed from all " + std::to_string(starts.size()) +
                            " starts (N=" + std::to_string(xn.rows()) + ", D=" + std::to_string(xn.cols()) + ")");
    return out;
}

double loo_mse(const GpModel& model) {
    const auto loo = model.leave_one_out();
    return (loo.mean - model.outputs()).squaredNorm() / static_cast<double>(model.outputs().size());
}

} // namespace detail

GpTrainingResult train_gp_detailed(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                                   std::span<const VariableMeta> bounds, KernelKind kind, const GpConfig& config,
                                   const std::vector<bool>& mask) {
    if (inputs.rows() < 1) throw std::invalid_argument("train_gp needs N >= 1");
    if (outputs.size() != inputs.rows()) throw std::invalid_argument("output length does not match inputs");
    if (static_cast<Eigen::Index>(bounds.size()) != inputs.cols())
        throw std::invalid_argument("bounds do not match the input dimension");
    if (!outputs.allFinite()) throw TrainingError("training outputs must be finite");

    if (kind == KernelKind::kpls) return detail::train_kpls(inputs, outputs, bounds, config, mask, nullptr);

    auto norm = Normalization::fit(bounds, outputs);
    const Eigen::MatrixXd xn = norm.normalize_rows(inputs);
    const Eigen::VectorXd ys = ((outputs.array() - norm.y_mean) / norm.y_scale).matrix();
    const auto d = static_cast<int>(inputs.cols());
    auto coefficients = [](const Eigen::VectorXd& log_l) { return (0.5 * (-log_l.array()).exp()).matrix().eval(); };
    auto search = detail::search_hyperparameters(xn, ys, d, coefficients, config);
    SeKernelParams params{search.best.variance, search.best_log_hyper.array().exp().matrix()};
    GpModel model(inputs, outputs, std::move(norm), params, search.best.mean_bias, search.best.nugget,
                  config.max_nugget);
    return {std::move(model), std::move(search.starts), search.best_start};
}

GpModel train_gp(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, std::span<const VariableMeta> bounds,
                 KernelKind kind, const GpConfig& config, const std::vector<bool>& mask) {
    return train_gp_detailed(inputs, outputs, bounds, kind, config, mask).model;
}

const Eigen::VectorXd& doe_output(const Doe& doe, int column) {
    return column < 0 ? doe.objective() : doe.constraint(static_cast<std::size_t>(column)).values;
}

GpModel train_gp(const Doe& doe, int column, KernelKind kind, const GpConfig& config, const std::vector<bool>& mask) {
    return train_gp(doe.inputs(), doe_output(doe, column), doe.variables(), kind, config, mask);
}

} // namespace xferbo
