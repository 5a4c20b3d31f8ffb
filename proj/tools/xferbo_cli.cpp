#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "xferbo/benchmarks.hpp"
#include "xferbo/csv.hpp"
#include "xferbo/errors.hpp"
#include "xferbo/experiment.hpp"
#include "xferbo/summary.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_failure = 2;

std::uint64_t parse_seed(const char* text) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != std::string(text).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw xferbo::ConfigError(std::string("XFERBO_SEED is not an unsigned integer: ") + text);
    }
}

void print_summary(const xferbo::ConvergenceSummary& summary) {
    for (const auto& m : summary.methods) {
        if (m.iterations.empty()) continue;
        const auto& last = m.iterations.back();
        std::cout << m.method << ": " << m.runs << " runs, final median " << xferbo::format_double(last.median)
                  << " [q1 " << xferbo::format_double(last.q1) << ", q3 " << xferbo::format_double(last.q3)
                  << "], mean " << xferbo::format_double(last.mean) << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained Bayesian optimization with transfer-learning GP ensembles"};
    app.require_subcommand(1);
    app.fallthrough();
    bool verbose = false, quiet = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_flag("-q,--quiet", quiet, "Warnings and errors only");

    auto* run = app.add_subcommand("run", "Run an experiment from a JSON config or manifest");
    std::string config_path, out_dir;
    std::optional<int> jobs, runs, iterations;
    std::optional<std::uint64_t> seed;
    run->add_option("--config", config_path, "Experiment config (or a manifest.json to re-run)")->required();
    run->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    run->add_option("--runs", runs, "Number of runs (overrides runs)")->check(CLI::PositiveNumber);
    run->add_option("--iterations", iterations, "Iterations per run (overrides iterations)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--seed", seed, "Base seed (overrides XFERBO_SEED and the config)");

    auto* summarize = app.add_subcommand("summarize", "Recompute summaries from history CSVs");
    std::string in_dir, summary_out;
    summarize->add_option("--in", in_dir, "Directory with history_<method>_runNN.csv files")->required();
    summarize->add_option("--out", summary_out, "Where to write summary CSVs (default: the input directory)");

    auto* list = app.add_subcommand("list-cases", "List built-in benchmark cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);

    try {
        if (*list) {
            for (const auto& name : xferbo::case_names()) {
                const auto c = xferbo::make_case(name);
                std::cout << name << "  dim=" << c.target.dim() << " constraints=" << c.target.constraints.size()
                          << " sources=" << c.sources.size() << " initial=" << c.reference.initial_doe_size
                          << " iterations=" << c.reference.iterations << " runs=" << c.reference.runs << '\n';
            }
            return exit_ok;
        }
        if (*summarize) {
            const auto summary = xferbo::summarize_directory(in_dir);
            const std::filesystem::path dir(summary_out.empty() ? in_dir : summary_out);
            std::filesystem::create_directories(dir);
            for (const auto& m : summary.methods) {
                std::ofstream out(dir / ("summary_" + m.method + ".csv"), std::ios::binary);
                if (!out) throw xferbo::Error("cannot write summary for " + m.method);
                xferbo::write_summary_csv(out, m);
            }
            print_summary(summary);
            return exit_ok;
        }

        auto config = xferbo::ExperimentConfig::from_file(config_path);
        if (const char* env = std::getenv("XFERBO_SEED"); env && *env) config.seed = parse_seed(env);
        if (seed) config.seed = *seed;
        if (jobs) config.jobs = *jobs;
        if (runs) config.runs = *runs;
        if (iterations) config.iterations = *iterations;
        if (!out_dir.empty()) config.output_dir = out_dir;
        config.validate();

        const auto result = xferbo::run_experiment(config);
        print_summary(result.summary);
        std::cout << "results in " << config.output_dir << '\n';
        if (result.failures > 0) {
            spdlog::error("{} run(s) failed; see manifest.json", result.failures);
            return exit_failure;
        }
        return exit_ok;
    } catch (const xferbo::ConfigError& e) {
        spdlog::error("{}", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return exit_failure;
    }
}
