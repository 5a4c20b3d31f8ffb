#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xferbo {

/// Quartiles with the inclusive-median convention: for odd n both halves contain the median.
struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Throws std::invalid_argument on an empty sample.
Quartiles inclusive_quartiles(std::vector<double> values);

struct IterationStats {
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
    double wall_time_mean = 0.0;
};

/// Best-feasible-so-far and clock after each iteration 0..T of one run.
struct RunSeries {
    std::vector<double> best;
    std::vector<double> wall_time;
};

struct MethodSummary {
    std::string method;
    std::size_t runs = 0;
    std::vector<IterationStats> iterations;
};

struct ConvergenceSummary {
    std::vector<MethodSummary> methods;
};

/// Order statistics per iteration across runs. Series of unequal length are truncated to the
/// shortest with a warning.
MethodSummary summarize_runs(const std::string& method, const std::vector<RunSeries>& runs);

/// Reads a history CSV (`iter,best_feasible,objective,feasible,wall_time`); each iteration takes
/// its last row.
RunSeries read_history_series(const std::string& path);

/// Groups `history_<method>_run<k>.csv` files of a directory by method.
ConvergenceSummary summarize_directory(const std::string& directory);

/// `iter,mean,median,q1,q3,min,max,wall_time_mean`.
void write_summary_csv(std::ostream& out, const MethodSummary& summary);

} // namespace xferbo
