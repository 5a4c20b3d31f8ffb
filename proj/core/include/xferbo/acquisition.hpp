#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "xferbo/doe.hpp"
#include "xferbo/surrogate.hpp"

namespace xferbo {

struct AcquisitionConfig {
    std::size_t candidate_count = 1000;
    /// Simplex evaluations spent polishing the best candidate; 0 disables polishing.
    int refine_steps = 100;
    /// Below this predictive sd the improvement is treated as deterministic.
    double sd_floor = 1e-12;
};

/// EI = (y_min - mean) Phi(z) + sd phi(z), z = (y_min - mean) / sd. For sd < sd_floor returns
/// max(y_min - mean, 0). Never negative.
double expected_improvement(double mean, double sd, double y_min, double sd_floor = 1e-12);

double normal_pdf(double z);
double normal_cdf(double z);

struct AcquisitionResult {
    Eigen::VectorXd x;
    double expected_improvement = 0.0;
    /// Every constraint surrogate mean <= 0 at x.
    bool surrogate_feasible = true;
    /// sum_i max(c_i(x), 0) at x.
    double violation = 0.0;
    std::size_t candidate_index = 0;
    bool polished = false;
};

/// Maximizes EI subject to constraint-surrogate means <= 0 over `candidate_count` LHS candidates,
/// then polishes the winner with a bounded simplex that rejects infeasible points. If no
/// candidate is surrogate-feasible, returns the one with the least total violation.
AcquisitionResult maximize_constrained(const Surrogate& objective, std::span<const Surrogate* const> constraints,
                                       std::span<const VariableMeta> bounds, double y_min,
                                       const AcquisitionConfig& config, std::uint64_t seed);

} // namespace xferbo
