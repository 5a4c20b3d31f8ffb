#pragma once

#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "xferbo/doe.hpp"

namespace xferbo {

struct SourceDiagnostics {
    std::string name;
    double alpha = 1.0;
    double beta = 0.0;
    double tau_shape = 0.0;
    double tau_accuracy = 0.0;
    double tau_variance = 0.0;
    double probability = 0.0;
};

/// One ensemble (objective or a constraint) as built at one iteration.
struct EnsembleDiagnostics {
    std::string output;
    bool informative = true;
    std::vector<SourceDiagnostics> sources;
};

/// One blackbox evaluation. Rows of the initial DOE carry iteration 0.
struct IterationRecord {
    int iteration = 0;
    Eigen::VectorXd x;
    double objective = 0.0;
    std::vector<double> constraints;
    bool feasible = true;
    /// +inf until the first feasible point.
    double best_feasible_so_far = HUGE_VAL;
    double wall_time_seconds = 0.0;
    /// True when the step used transfer ensembles (false for VBO and alternated steps).
    bool transfer_step = false;
    std::vector<EnsembleDiagnostics> ensembles;
};

struct RunHistory {
    std::string method;
    std::vector<VariableMeta> variables;
    std::vector<ConstraintMeta> constraints;
    std::size_t initial_size = 0;
    int failed_evaluations = 0;
    std::vector<IterationRecord> records;

    /// Best feasible value after each iteration 0..max_iter (last record of that iteration).
    std::vector<double> best_per_iteration() const;
    /// The evaluated DOE.
    Doe to_doe() const;
};

struct BestPoint {
    Eigen::VectorXd x;
    double objective = 0.0;
    std::size_t record = 0;
};

/// Minimal objective among records with every constraint <= 0; empty if none is feasible.
/// Ties keep the earliest record.
std::optional<BestPoint> best_feasible(const RunHistory& history);

/// Fills feasible flags and the running best from the raw records (in place).
void update_running_best(RunHistory& history);

/// CSV `iter,best_feasible,objective,feasible,wall_time`. The wall_time column is the modeled
/// evaluation clock `cost_per_eval * evaluations so far`, so files are reproducible byte-for-byte;
/// measured time goes to the sidecar.
void write_history_csv(std::ostream& out, const RunHistory& history, double cost_per_eval = 0.0);

/// JSON sidecar: evaluated points, constraint values, measured wall time, and per-iteration
/// ensemble diagnostics.
nlohmann::json history_sidecar(const RunHistory& history, bool include_measured_time = false);

} // namespace xferbo
