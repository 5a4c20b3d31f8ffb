#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "xferbo/gp.hpp"

namespace xferbo {

struct PlsWeights {
    /// h x D, unit-norm rows; columns of masked variables are exactly zero.
    Eigen::MatrixXd weights;
    /// Output column carried no covariance with the inputs; uniform weights were used.
    bool degenerate = false;
};

/// Single-output NIPALS PLS with deflation on column-centered inputs. Each row is a rotated
/// weight vector w*^(l), normalized to unit length. Stops early when the deflated inputs or
/// outputs vanish. Masked columns are excluded from the regression and get zero weight.
PlsWeights pls_weights(const Eigen::MatrixXd& points, const Eigen::VectorXd& y, int max_components,
                       const std::vector<bool>& mask = {});

struct KplsFit {
    Eigen::MatrixXd weights;  // n_components x D
    int n_components = 0;
    bool degenerate = false;
    /// Leave-one-out mean squared error (raw units) per candidate h = 1, 2, ...
    std::vector<double> loo_errors;
};

/// Fits PLS weights and selects the number of components by leave-one-out error of the
/// resulting KPLS GP. Requires N >= 3.
KplsFit fit_kpls_weights(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                         std::span<const VariableMeta> bounds, int max_components, const GpConfig& config,
                         const std::vector<bool>& mask = {});

} // namespace xferbo
