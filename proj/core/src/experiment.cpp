#include "xferbo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "xferbo/csv.hpp"
#include "xferbo/errors.hpp"
#include "xferbo/random.hpp"

namespace xferbo {

using nlohmann::json;

MethodSpec MethodSpec::parse(std::string_view name) {
    if (name == "VBO") return {OptimizerMode::vbo, VariancePolicy::target};
    if (name == "TLBO-ETL-TV") return {OptimizerMode::tlbo, VariancePolicy::target};
    if (name == "TLBO-ETL-AV") return {OptimizerMode::tlbo, VariancePolicy::weighted};
    throw ConfigError("unknown method '" + std::string(name) + "' (expected VBO, TLBO-ETL-TV or TLBO-ETL-AV)");
}

std::string MethodSpec::name() const {
    if (mode == OptimizerMode::vbo) return "VBO";
    return std::string("TLBO-ETL-") + std::string(to_string(variance_policy));
}

RunSeeds RunSeeds::derive(std::uint64_t base, int run) {
    RunSeeds s;
    s.run = derive_seed(base, "run", static_cast<std::uint64_t>(run));
    s.sources = derive_seed(s.run, "sources");
    s.initial = derive_seed(s.run, "initial");
    s.optimizer = derive_seed(s.run, "optimizer");
    return s;
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

json criteria_to_json(const CriteriaConfig& c) {
    return {{"w_shape", c.w_shape},         {"w_accuracy", c.w_accuracy},     {"w_variance", c.w_variance},
            {"rho_shape", c.rho_shape},     {"rho_accuracy", c.rho_accuracy}, {"rho_variance", c.rho_variance},
            {"eps_max", c.eps_max},         {"sigma_max", c.sigma_max}};
}

CriteriaConfig criteria_from_json(const json& j, CriteriaConfig c, const std::string& where) {
    check_keys(j, {"w_shape", "w_accuracy", "w_variance", "rho_shape", "rho_accuracy", "rho_variance", "eps_max",
                   "sigma_max"},
               where);
    read(j, "w_shape", c.w_shape);
    read(j, "w_accuracy", c.w_accuracy);
    read(j, "w_variance", c.w_variance);
    read(j, "rho_shape", c.rho_shape);
    read(j, "rho_accuracy", c.rho_accuracy);
    read(j, "rho_variance", c.rho_variance);
    read(j, "eps_max", c.eps_max);
    read(j, "sigma_max", c.sigma_max);
    return c;
}

std::string_view kernel_policy_name(SourceKernelPolicy p) {
    switch (p) {
    case SourceKernelPolicy::se: return "se";
    case SourceKernelPolicy::kpls: return "kpls";
    case SourceKernelPolicy::automatic: break;
    }
    return "automatic";
}

SourceKernelPolicy parse_kernel_policy(const std::string& s) {
    if (s == "automatic") return SourceKernelPolicy::automatic;
    if (s == "se") return SourceKernelPolicy::se;
    if (s == "kpls") return SourceKernelPolicy::kpls;
    throw ConfigError("unknown source_kernel '" + s + "'");
}

json optimizer_to_json(const OptimizerConfig& o) {
    return {{"alternation_interval", optional_json(o.alternation_interval)},
            {"freeze_probabilities_after", optional_json(o.freeze_probabilities_after)},
            {"source_kernel", std::string(kernel_policy_name(o.source_kernel))},
            {"include_target_member", o.include_target_member},
            {"gp",
             {{"n_starts", o.gp.n_starts},
              {"log_hyper_lower", o.gp.log_hyper_lower},
              {"log_hyper_upper", o.gp.log_hyper_upper},
              {"max_evaluations_per_start", o.gp.max_evaluations_per_start},
              {"nugget", o.gp.nugget},
              {"max_nugget", o.gp.max_nugget},
              {"kpls_max_components", o.gp.kpls_max_components}}},
            {"acquisition",
             {{"candidate_count", o.acquisition.candidate_count},
              {"refine_steps", o.acquisition.refine_steps},
              {"sd_floor", o.acquisition.sd_floor}}},
            {"objective_criteria", criteria_to_json(o.objective_criteria)},
            {"constraint_criteria", criteria_to_json(o.constraint_criteria)}};
}

OptimizerConfig optimizer_from_json(const json& j) {
    check_keys(j, {"alternation_interval", "freeze_probabilities_after", "source_kernel", "include_target_member",
                   "gp", "acquisition", "objective_criteria", "constraint_criteria"},
               "optimizer");
    OptimizerConfig o;
    read_opt(j, "alternation_interval", o.alternation_interval);
    read_opt(j, "freeze_probabilities_after", o.freeze_probabilities_after);
    if (j.contains("source_kernel")) o.source_kernel = parse_kernel_policy(j.at("source_kernel").get<std::string>());
    read(j, "include_target_member", o.include_target_member);
    if (j.contains("gp")) {
        const auto& g = j.at("gp");
        check_keys(g, {"n_starts", "log_hyper_lower", "log_hyper_upper", "max_evaluations_per_start", "nugget",
                       "max_nugget", "kpls_max_components"},
                   "optimizer.gp");
        read(g, "n_starts", o.gp.n_starts);
        read(g, "log_hyper_lower", o.gp.log_hyper_lower);
        read(g, "log_hyper_upper", o.gp.log_hyper_upper);
        read(g, "max_evaluations_per_start", o.gp.max_evaluations_per_start);
        read(g, "nugget", o.gp.nugget);
        read(g, "max_nugget", o.gp.max_nugget);
        read(g, "kpls_max_components", o.gp.kpls_max_components);
    }
    if (j.contains("acquisition")) {
        const auto& a = j.at("acquisition");
        check_keys(a, {"candidate_count", "refine_steps", "sd_floor"}, "optimizer.acquisition");
        read(a, "candidate_count", o.acquisition.candidate_count);
        read(a, "refine_steps", o.acquisition.refine_steps);
        read(a, "sd_floor", o.acquisition.sd_floor);
    }
    if (j.contains("objective_criteria"))
        o.objective_criteria =
            criteria_from_json(j.at("objective_criteria"), o.objective_criteria, "optimizer.objective_criteria");
    if (j.contains("constraint_criteria"))
        o.constraint_criteria =
            criteria_from_json(j.at("constraint_criteria"), o.constraint_criteria, "optimizer.constraint_criteria");
    return o;
}

std::vector<VariableMeta> variables_from_json(const json& j) {
    std::vector<VariableMeta> v;
    for (const auto& e : j)
        v.push_back({e.at("name").get<std::string>(), e.at("lower").get<double>(), e.at("upper").get<double>()});
    return v;
}

json variables_to_json(const std::vector<VariableMeta>& vars) {
    json a = json::array();
    for (const auto& v : vars) a.push_back({{"name", v.name}, {"lower", v.lower}, {"upper", v.upper}});
    return a;
}

std::vector<ConstraintMeta> constraints_from_json(const json& j) {
    std::vector<ConstraintMeta> c;
    for (const auto& e : j)
        c.push_back({e.at("name").get<std::string>(),
                     e.contains("category") ? parse_category(e.at("category").get<std::string>())
                                            : ConstraintCategory::other});
    return c;
}

json constraints_to_json(const std::vector<ConstraintMeta>& cons) {
    json a = json::array();
    for (const auto& c : cons) a.push_back({{"name", c.name}, {"category", std::string(to_string(c.category))}});
    return a;
}

/// The problem an experiment optimizes, with its source DOE factory.
struct ResolvedProblem {
    ProblemSpec target;
    std::function<std::vector<SourceProblem>(std::uint64_t)> sources;
    ReferenceConfig reference;
};

ResolvedProblem resolve_problem(const ExperimentConfig& config) {
    ResolvedProblem p;
    if (config.external) {
        p.target = external_blackbox(*config.external);
        std::vector<SourceProblem> fixed;
        for (const auto& s : config.external_sources)
            fixed.push_back({s.name, read_doe_csv_file(s.csv, s.variables, s.constraints)});
        p.sources = [fixed](std::uint64_t) { return fixed; };
        p.reference = {p.target.dim() + 1, 20, 1};
        return p;
    }
    auto bench = config.case_name == "rosenbrock_mf22" && config.dim ? rosenbrock_mf_case(*config.dim)
                                                                      : make_case(config.case_name);
    p.target = bench.target;
    p.reference = bench.reference;
    const auto size = config.source_doe_size;
    p.sources = [bench = std::move(bench), size](std::uint64_t seed) { return generate_source_does(bench, seed, size); };
    return p;
}

std::string run_tag(int run) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "run%02d", run);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    try {
        check_keys(j,
                   {"case", "dim", "external", "methods", "runs", "iterations", "initial_doe_size", "source_doe_size",
                    "initial_sampling", "seed", "output_dir", "jobs", "cost_per_eval", "optimizer"},
                   "config");
        read(j, "case", c.case_name);
        read_opt(j, "dim", c.dim);
        if (j.contains("external") && !j.at("external").is_null()) {
            json desc = j.at("external");
            if (desc.contains("sources")) {
                for (const auto& s : desc.at("sources"))
                    c.external_sources.push_back(
                        {s.at("name").get<std::string>(), s.at("csv").get<std::string>(),
                         variables_from_json(s.at("variables")),
                         s.contains("constraints") ? constraints_from_json(s.at("constraints"))
                                                   : std::vector<ConstraintMeta>{}});
                desc.erase("sources");
            }
            c.external = ExternalDescriptor::from_json(desc);
        }
        read(j, "methods", c.methods);
        read_opt(j, "runs", c.runs);
        read_opt(j, "iterations", c.iterations);
        read_opt(j, "initial_doe_size", c.initial_doe_size);
        read_opt(j, "source_doe_size", c.source_doe_size);
        if (j.contains("initial_sampling"))
            c.initial_sampling = parse_sampling(j.at("initial_sampling").get<std::string>());
        read(j, "seed", c.seed);
        read(j, "output_dir", c.output_dir);
        read(j, "jobs", c.jobs);
        read(j, "cost_per_eval", c.cost_per_eval);
        if (j.contains("optimizer")) c.optimizer = optimizer_from_json(j.at("optimizer"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    // a manifest carries the config under "config"
    if (j.contains("config") && j.value("format", "") == "xferbo-manifest") return from_json(j.at("config"));
    return from_json(j);
}

json ExperimentConfig::to_json() const {
    json j;
    j["case"] = case_name;
    j["dim"] = optional_json(dim);
    if (external) {
        json desc = external->to_json();
        json sources = json::array();
        for (const auto& s : external_sources)
            sources.push_back({{"name", s.name},
                               {"csv", s.csv},
                               {"variables", variables_to_json(s.variables)},
                               {"constraints", constraints_to_json(s.constraints)}});
        desc["sources"] = sources;
        j["external"] = desc;
    } else {
        j["external"] = nullptr;
    }
    j["methods"] = methods;
    j["runs"] = optional_json(runs);
    j["iterations"] = optional_json(iterations);
    j["initial_doe_size"] = optional_json(initial_doe_size);
    j["source_doe_size"] = optional_json(source_doe_size);
    j["initial_sampling"] = std::string(to_string(initial_sampling));
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    j["jobs"] = jobs;
    j["cost_per_eval"] = cost_per_eval;
    j["optimizer"] = optimizer_to_json(optimizer);
    return j;
}

void ExperimentConfig::validate() const {
    if (!external) {
        const auto names = case_names();
        if (std::find(names.begin(), names.end(), case_name) == names.end())
            throw ConfigError("unknown case '" + case_name + "'");
    }
    if (methods.empty()) throw ConfigError("no methods configured");
    std::set<std::string> seen;
    bool transfer = false;
    for (const auto& m : methods) {
        transfer = transfer || MethodSpec::parse(m).mode == OptimizerMode::tlbo;
        if (!seen.insert(m).second) throw ConfigError("method '" + m + "' listed twice");
    }
    if (external && transfer && external_sources.empty())
        throw ConfigError("TLBO on an external problem needs external.sources");
    if (runs && *runs < 1) throw ConfigError("runs must be positive");
    if (iterations && *iterations < 0) throw ConfigError("iterations must be >= 0");
    if (initial_doe_size && *initial_doe_size < 1) throw ConfigError("initial_doe_size must be positive");
    if (source_doe_size && *source_doe_size < 1) throw ConfigError("source_doe_size must be positive");
    if (jobs < 1) throw ConfigError("jobs must be positive");
    if (!(cost_per_eval >= 0.0)) throw ConfigError("cost_per_eval must be >= 0");
    if (optimizer.alternation_interval && *optimizer.alternation_interval < 1)
        throw ConfigError("alternation_interval must be positive");
    OptimizerConfig probe = optimizer;
    probe.mode = OptimizerMode::tlbo;
    probe.validate();
}

RunSeries series_from_history(const RunHistory& history, double cost_per_eval) {
    RunSeries s;
    int current = -1;
    std::size_t evals = 0;
    for (const auto& r : history.records) {
        ++evals;
        // same arithmetic as the CSV writer, so the two agree bit for bit
        const double clock = cost_per_eval * static_cast<double>(evals);
        if (r.iteration != current) {
            s.best.push_back(r.best_feasible_so_far);
            s.wall_time.push_back(clock);
            current = r.iteration;
        } else {
            s.best.back() = r.best_feasible_so_far;
            s.wall_time.back() = clock;
        }
    }
    return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    namespace fs = std::filesystem;
    config.validate();
    const ResolvedProblem problem = resolve_problem(config);
    const int runs = config.runs.value_or(problem.reference.runs);
    const int iterations = config.iterations.value_or(problem.reference.iterations);
    const std::size_t initial_size = config.initial_doe_size.value_or(problem.reference.initial_doe_size);
    std::vector<MethodSpec> methods;
    for (const auto& m : config.methods) methods.push_back(MethodSpec::parse(m));

    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);

    ExperimentResult result;
    result.outcomes.resize(static_cast<std::size_t>(runs) * methods.size());

    auto do_run = [&](int r) {
        const RunSeeds seeds = RunSeeds::derive(config.seed, r);
        auto slot = [&](std::size_t m) -> RunOutcome& {
            return result.outcomes[static_cast<std::size_t>(r - 1) * methods.size() + m];
        };
        std::optional<Doe> initial;
        std::vector<SourceProblem> sources;
        try {
            // the initial DOE and the source DOEs are shared by every method of this run
            initial = evaluate_doe(problem.target,
                                   sample(config.initial_sampling, problem.target.variables, initial_size, seeds.initial));
            bool transfer = false;
            for (const auto& m : methods) transfer = transfer || m.mode == OptimizerMode::tlbo;
            if (transfer) sources = problem.sources(seeds.sources);
        } catch (const std::exception& e) {
            for (std::size_t m = 0; m < methods.size(); ++m) {
                slot(m) = {r, methods[m].name(), false, e.what(), {}, 0.0};
            }
            spdlog::error("run {}: setup failed: {}", r, e.what());
            return;
        }
        for (std::size_t m = 0; m < methods.size(); ++m) {
            RunOutcome& o = slot(m);
            o.run = r;
            o.method = methods[m].name();
            OptimizerConfig oc = config.optimizer;
            oc.mode = methods[m].mode;
            oc.variance_policy = methods[m].variance_policy;
            oc.seed = seeds.optimizer;
            oc.max_iter = iterations;
            if (oc.mode == OptimizerMode::vbo) oc.alternation_interval.reset();
            const auto started = std::chrono::steady_clock::now();
            try {
                const RunHistory h = run_optimizer(problem.target, sources, *initial, oc);
                o.measured_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
                const std::string stem = o.method + "_" + run_tag(r);
                std::ostringstream csv;
                write_history_csv(csv, h, config.cost_per_eval);
                write_text(out_dir / ("history_" + stem + ".csv"), csv.str());
                write_text(out_dir / ("ensembles_" + stem + ".json"), history_sidecar(h, true).dump(1) + "\n");
                o.series = series_from_history(h, config.cost_per_eval);
                o.completed = true;
                spdlog::info("{} {}: best {} ({:.1f} s)", o.method, run_tag(r), o.series.best.back(),
                             o.measured_seconds);
            } catch (const std::exception& e) {
                o.error = e.what();
                spdlog::error("{} {} failed: {}", o.method, run_tag(r), e.what());
            }
        }
    };

    const int workers = std::max(1, std::min(config.jobs, runs));
    std::atomic<int> next{1};
    auto worker = [&] {
        for (int r = next++; r <= runs; r = next++) do_run(r);
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    for (const auto& m : methods) {
        std::vector<RunSeries> completed;
        for (const auto& o : result.outcomes)
            if (o.method == m.name() && o.completed) completed.push_back(o.series);
        if (completed.empty()) {
            spdlog::warn("{}: no completed run, no summary written", m.name());
            continue;
        }
        if (completed.size() < static_cast<std::size_t>(runs))
            spdlog::warn("{}: summary over {} of {} runs", m.name(), completed.size(), runs);
        auto s = summarize_runs(m.name(), completed);
        std::ostringstream csv;
        write_summary_csv(csv, s);
        write_text(out_dir / ("summary_" + m.name() + ".csv"), csv.str());
        result.summary.methods.push_back(std::move(s));
    }

    json manifest;
    manifest["format"] = "xferbo-manifest";
    manifest["version"] = 1;
    manifest["config"] = config.to_json();
    manifest["resolved"] = {{"runs", runs},
                            {"iterations", iterations},
                            {"initial_doe_size", initial_size},
                            {"problem", problem.target.name}};
    json run_list = json::array();
    for (int r = 1; r <= runs; ++r) {
        const RunSeeds s = RunSeeds::derive(config.seed, r);
        json entry = {{"run", r},
                      {"seed", s.run},
                      {"sources_seed", s.sources},
                      {"initial_seed", s.initial},
                      {"optimizer_seed", s.optimizer}};
        json per_method = json::object();
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const auto& o = result.outcomes[static_cast<std::size_t>(r - 1) * methods.size() + m];
            json item = {{"completed", o.completed}, {"measured_seconds", o.measured_seconds}};
            if (o.completed) {
                item["history"] = "history_" + o.method + "_" + run_tag(r) + ".csv";
                item["final_best"] = format_double(o.series.best.back());
            } else {
                item["error"] = o.error;
                ++result.failures;
            }
            per_method[o.method] = item;
        }
        entry["methods"] = per_method;
        run_list.push_back(entry);
    }
    manifest["runs"] = run_list;
    manifest["failures"] = result.failures;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return result;
}

} // namespace xferbo
