#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xferbo/benchmarks.hpp"
#include "xferbo/external_blackbox.hpp"
#include "xferbo/optimizer.hpp"
#include "xferbo/summary.hpp"

namespace xferbo {

/// "VBO", "TLBO-ETL-TV" or "TLBO-ETL-AV".
struct MethodSpec {
    OptimizerMode mode = OptimizerMode::vbo;
    VariancePolicy variance_policy = VariancePolicy::target;

    static MethodSpec parse(std::string_view name);
    std::string name() const;
};

/// A fixed source DOE read from CSV, for external problems.
struct SourceFile {
    std::string name;
    std::string csv;
    std::vector<VariableMeta> variables;
    std::vector<ConstraintMeta> constraints;
};

struct ExperimentConfig {
    std::string case_name;
    /// Rosenbrock dimension.
    std::optional<std::size_t> dim;
    std::optional<ExternalDescriptor> external;
    std::vector<SourceFile> external_sources;

    std::vector<std::string> methods = {"VBO", "TLBO-ETL-TV"};
    /// Unset values take the case's reference config.
    std::optional<int> runs;
    std::optional<int> iterations;
    std::optional<std::size_t> initial_doe_size;
    std::optional<std::size_t> source_doe_size;
    SamplingScheme initial_sampling = SamplingScheme::uniform;
    std::uint64_t seed = 0;
    std::string output_dir = "results";
    int jobs = 1;
    /// Modeled seconds per blackbox evaluation for the history wall_time column.
    double cost_per_eval = 0.0;
    /// Method, seed and max_iter are set per run; everything else is used as given.
    OptimizerConfig optimizer;

    /// Throws ConfigError on unknown keys' values or inconsistent settings.
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    /// Complete document; a manifest's "config" entry parses back to an identical config.
    nlohmann::json to_json() const;
    void validate() const;
};

struct RunOutcome {
    int run = 0;
    std::string method;
    bool completed = false;
    std::string error;
    RunSeries series;
    double measured_seconds = 0.0;
};

struct ExperimentResult {
    ConvergenceSummary summary;
    /// Ordered by run, then by method as configured.
    std::vector<RunOutcome> outcomes;
    std::size_t failures = 0;
};

/// Per-run seeds: all methods of one run share them.
struct RunSeeds {
    std::uint64_t run = 0;
    std::uint64_t sources = 0;
    std::uint64_t initial = 0;
    std::uint64_t optimizer = 0;

    static RunSeeds derive(std::uint64_t base, int run);
};

RunSeries series_from_history(const RunHistory& history, double cost_per_eval);

/// Runs every (run, method) pair, writes histories, sidecars, summaries and the manifest into
/// config.output_dir. Runs execute on up to config.jobs threads.
ExperimentResult run_experiment(const ExperimentConfig& config);

} // namespace xferbo
