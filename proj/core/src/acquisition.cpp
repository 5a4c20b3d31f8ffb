#include "xferbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "xferbo/nelder_mead.hpp"

namespace xferbo {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double sd, double y_min, double sd_floor) {
    if (sd < 0.0) throw std::invalid_argument("expected_improvement needs sd >= 0");
    const double improvement = y_min - mean;
    if (sd < sd_floor) return std::max(improvement, 0.0);
    const double z = improvement / sd;
    return std::max(0.0, improvement * normal_cdf(z) + sd * normal_pdf(z));
}

namespace {

struct CandidateValue {
    double ei = 0.0;
    double violation = 0.0;
    bool feasible = true;
};

CandidateValue evaluate(const Surrogate& objective, std::span<const Surrogate* const> constraints,
                        const Eigen::VectorXd& x, double y_min, double sd_floor) {
    CandidateValue v;
    for (const auto* c : constraints) {
        const double m = c->predict(x).mean;
        if (m > 0.0) {
            v.feasible = false;
            v.violation += m;
        }
    }
    if (v.feasible) {
        const auto p = objective.predict(x);
        v.ei = expected_improvement(p.mean, p.sd, y_min, sd_floor);
    }
    return v;
}

} // namespace

AcquisitionResult maximize_constrained(const Surrogate& objective, std::span<const Surrogate* const> constraints,
                                       std::span<const VariableMeta> bounds, double y_min,
                                       const AcquisitionConfig& config, std::uint64_t seed) {
    if (config.candidate_count < 1) throw std::invalid_argument("candidate_count must be >= 1");
    const Eigen::MatrixXd candidates = lhs_sample(bounds, config.candidate_count, seed);

    std::optional<std::size_t> best_feasible, least_violation;
    CandidateValue best_value, least_value;
    for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
        const Eigen::VectorXd x = candidates.row(i).transpose();
        const auto v = evaluate(objective, constraints, x, y_min, config.sd_floor);
        const auto idx = static_cast<std::size_t>(i);
        if (v.feasible) {
            if (!best_feasible || v.ei > best_value.ei) {
                best_feasible = idx;
                best_value = v;
            }
        } else if (!least_violation || v.violation < least_value.violation) {
            least_violation = idx;
            least_value = v;
        }
    }

    AcquisitionResult result;
    if (!best_feasible) {
        result.candidate_index = *least_violation;
        result.x = candidates.row(static_cast<Eigen::Index>(*least_violation)).transpose();
        result.surrogate_feasible = false;
        result.violation = least_value.violation;
        return result;
    }

    result.candidate_index = *best_feasible;
    result.x = candidates.row(static_cast<Eigen::Index>(*best_feasible)).transpose();
    result.expected_improvement = best_value.ei;

    if (config.refine_steps > 0 && best_value.ei > 0.0) {
        const auto d = static_cast<Eigen::Index>(bounds.size());
        Eigen::VectorXd lower(d), width(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            lower(k) = bounds[static_cast<std::size_t>(k)].lower;
            width(k) = bounds[static_cast<std::size_t>(k)].width();
        }
        auto to_x = [&](const Eigen::VectorXd& u) { return (lower.array() + u.array() * width.array()).matrix().eval(); };
        auto f = [&](const Eigen::VectorXd& u) {
            if ((u.array() < 0.0).any() || (u.array() > 1.0).any()) return std::numeric_limits<double>::infinity();
            const auto v = evaluate(objective, constraints, to_x(u), y_min, config.sd_floor);
            return v.feasible ? -v.ei : std::numeric_limits<double>::infinity();
        };
        NelderMeadOptions opts;
        opts.max_evaluations = config.refine_steps;
        opts.initial_step = 0.02;
        opts.f_tolerance = 0.0;
        opts.x_tolerance = 1e-9;
        const Eigen::VectorXd u0 = ((result.x - lower).array() / width.array()).matrix();
        const auto res = nelder_mead(f, u0, opts);
        if (std::isfinite(res.value) && -res.value > best_value.ei) {
            Eigen::VectorXd x = to_x(res.x);
            for (Eigen::Index k = 0; k < d; ++k)
                x(k) = std::clamp(x(k), bounds[static_cast<std::size_t>(k)].lower, bounds[static_cast<std::size_t>(k)].upper);
            result.x = x;
            result.expected_improvement = -res.value;
            result.polished = true;
        }
    }
    return result;
}

} // namespace xferbo
