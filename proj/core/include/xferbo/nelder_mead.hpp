#pragma once

#include <functional>

#include <Eigen/Dense>

namespace xferbo {

struct NelderMeadOptions {
    int max_evaluations = 200;
    /// Initial simplex edge along each axis.
    double initial_step = 0.5;
    /// Stop once the spread of simplex values and its diameter are both below these.
    double f_tolerance = 1e-8;
    double x_tolerance = 1e-6;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
};

/// Minimizes `f` with the standard reflection/expansion/contraction/shrink simplex method.
/// Non-finite values are treated as +inf, so callers can encode hard constraints that way.
/// The returned value is never worse than f(start).
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& start,
                             const NelderMeadOptions& options = {});

} // namespace xferbo
