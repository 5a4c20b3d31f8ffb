#include "xferbo/optimizer.hpp"

#include <chrono>
#include <map>
#include <memory>

#include <spdlog/spdlog.h>

#include "xferbo/errors.hpp"
#include "xferbo/heterogeneity.hpp"
#include "xferbo/random.hpp"

namespace xferbo {

void OptimizerConfig::validate() const {
    if (max_iter < 0) throw ConfigError("max_iter must be >= 0");
    if (alternation_interval) {
        if (mode != OptimizerMode::tlbo) throw ConfigError("alternation_interval is only valid in TLBO mode");
        if (*alternation_interval < 1) throw ConfigError("alternation_interval must be positive");
    }
    if (freeze_probabilities_after && *freeze_probabilities_after < 1)
        throw ConfigError("freeze_probabilities_after must be positive");
    if (acquisition.candidate_count < 1) throw ConfigError("acquisition candidate_count must be >= 1");
    try {
        objective_criteria.validate();
        constraint_criteria.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

namespace {

using Clock = std::chrono::steady_clock;

struct CachedSource {
    std::string name;
    std::shared_ptr<const GpModel> gp;
};

struct SourceCache {
    std::vector<CachedSource> objective;
    std::vector<std::vector<CachedSource>> constraints;
};

GpConfig target_gp_config(const OptimizerConfig& config, int iteration, std::size_t output) {
    GpConfig cfg = config.gp;
    cfg.seed = derive_seed(derive_seed(config.seed, "target_gp", output), "iteration",
                           static_cast<std::uint64_t>(iteration));
    return cfg;
}

double incumbent(const Doe& doe) {
    double best_feasible = HUGE_VAL, best_any = HUGE_VAL;
    for (std::size_t i = 0; i < doe.size(); ++i) {
        const double y = doe.objective()(static_cast<Eigen::Index>(i));
        best_any = std::min(best_any, y);
        if (doe.feasible(i)) best_feasible = std::min(best_feasible, y);
    }
    return std::isfinite(best_feasible) ? best_feasible : best_any;
}

struct TargetModels {
    std::shared_ptr<const GpModel> objective;
    std::vector<std::shared_ptr<const GpModel>> constraints;
};

TargetModels train_targets(const Doe& doe, const OptimizerConfig& config, int iteration) {
    TargetModels t;
    t.objective = std::make_shared<const GpModel>(
        train_gp(doe, -1, KernelKind::se, target_gp_config(config, iteration, 0)));
    for (std::size_t j = 0; j < doe.constraint_count(); ++j)
        t.constraints.push_back(std::make_shared<const GpModel>(
            train_gp(doe, static_cast<int>(j), KernelKind::se, target_gp_config(config, iteration, j + 1))));
    return t;
}

void check_initial(const ProblemSpec& spec, const Doe& initial) {
    if (initial.dim() != spec.dim()) throw ConfigError("initial DOE dimension does not match the problem");
    if (initial.constraint_count() != spec.constraints.size())
        throw ConfigError("initial DOE constraint count does not match the problem");
}

RunHistory start_history(const ProblemSpec& spec, const Doe& initial, std::string method) {
    RunHistory h;
    h.method = std::move(method);
    h.variables = spec.variables;
    h.constraints = spec.constraints;
    h.initial_size = initial.size();
    for (std::size_t i = 0; i < initial.size(); ++i) {
        IterationRecord r;
        r.iteration = 0;
        r.x = initial.inputs().row(static_cast<Eigen::Index>(i)).transpose();
        r.objective = initial.objective()(static_cast<Eigen::Index>(i));
        for (const auto& c : initial.constraints()) r.constraints.push_back(c.values(static_cast<Eigen::Index>(i)));
        h.records.push_back(std::move(r));
    }
    update_running_best(h);
    return h;
}

std::pair<Eigen::VectorXd, Evaluation> evaluate_with_retry(const ProblemSpec& spec, const Eigen::VectorXd& x,
                                                           const OptimizerConfig& config, int iteration,
                                                           RunHistory& history) {
    auto call = [&](const Eigen::VectorXd& point) {
        Evaluation e = spec.evaluate(point);
        if (e.constraints.size() != spec.constraints.size())
            throw EvaluationError(static_cast<std::size_t>(iteration), "wrong number of constraint values");
        return e;
    };
    try {
        return {x, call(x)};
    } catch (const std::exception& first) {
        ++history.failed_evaluations;
        spdlog::warn("iteration {}: evaluation failed ({}), retrying at a resampled point", iteration, first.what());
    }
    const Eigen::VectorXd retry =
        uniform_sample(spec.variables, 1, derive_seed(config.seed, "retry", static_cast<std::uint64_t>(iteration)))
            .row(0)
            .transpose();
    try {
        return {retry, call(retry)};
    } catch (const std::exception& second) {
        ++history.failed_evaluations;
        throw EvaluationError(static_cast<std::size_t>(iteration), second.what());
    }
}

/// Shared outer loop. `propose` returns the next candidate and fills ensemble diagnostics.
template <typename Propose>
RunHistory run_loop(const ProblemSpec& spec, const Doe& initial, const OptimizerConfig& config, std::string method,
                    Propose&& propose) {
    config.validate();
    check_initial(spec, initial);
    const auto started = Clock::now();
    RunHistory history = start_history(spec, initial, std::move(method));
    for (auto& r : history.records) r.wall_time_seconds = 0.0;
    Doe doe = initial;
    for (int i = 1; i <= config.max_iter; ++i) {
        IterationRecord rec;
        rec.iteration = i;
        const Eigen::VectorXd candidate = propose(i, doe, rec);
        auto [x, eval] = evaluate_with_retry(spec, candidate, config, i, history);
        doe = doe.append(x, eval.objective, eval.constraints);
        rec.x = x;
        rec.objective = eval.objective;
        rec.constraints = eval.constraints;
        rec.wall_time_seconds = std::chrono::duration<double>(Clock::now() - started).count();
        history.records.push_back(std::move(rec));
        update_running_best(history);
    }
    return history;
}

std::vector<const Surrogate*> pointers(const std::vector<std::shared_ptr<const GpModel>>& models) {
    std::vector<const Surrogate*> out;
    for (const auto& m : models) out.push_back(m.get());
    return out;
}

Eigen::VectorXd vbo_step(const ProblemSpec& spec, const Doe& doe, const OptimizerConfig& config, int iteration) {
    const auto targets = train_targets(doe, config, iteration);
    const auto cons = pointers(targets.constraints);
    return maximize_constrained(*targets.objective, cons, spec.variables, incumbent(doe), config.acquisition,
                                derive_seed(config.seed, "acquisition", static_cast<std::uint64_t>(iteration)))
        .x;
}

EnsembleDiagnostics diagnostics_of(const std::string& output, const EnsembleSurrogate& e) {
    EnsembleDiagnostics d{output, e.informative(), {}};
    for (const auto& s : e.sources())
        d.sources.push_back({s.name, s.alpha, s.beta, s.criteria.tau_shape, s.criteria.tau_accuracy,
                             s.criteria.tau_variance, s.probability});
    return d;
}

KernelKind source_kernel_for(const OptimizerConfig& config, const AlignedSource& aligned) {
    switch (config.source_kernel) {
    case SourceKernelPolicy::se: return KernelKind::se;
    case SourceKernelPolicy::kpls: return KernelKind::kpls;
    case SourceKernelPolicy::automatic: break;
    }
    return aligned.heterogeneous() ? KernelKind::kpls : KernelKind::se;
}

std::shared_ptr<const GpModel> train_source(const AlignedSource& aligned, int column, KernelKind kind,
                                            const OptimizerConfig& config, std::size_t source,
                                            const std::string& name) {
    GpConfig cfg = config.gp;
    cfg.seed = derive_seed(derive_seed(config.seed, "source_gp", source), "column",
                           static_cast<std::uint64_t>(column + 1));
    try {
        if (kind == KernelKind::kpls)
            return std::make_shared<const GpModel>(build_masked_source_gp(aligned, column, cfg));
        return std::make_shared<const GpModel>(train_gp(aligned.doe, column, KernelKind::se, cfg));
    } catch (const std::exception& e) {
        spdlog::warn("dropping source model '{}': {}", name, e.what());
        return nullptr;
    }
}

SourceCache build_source_cache(const ProblemSpec& spec, const std::vector<SourceProblem>& sources,
                               const OptimizerConfig& config) {
    std::vector<AlignedSource> aligned;
    std::vector<std::size_t> index;  // position in `sources`
    for (std::size_t j = 0; j < sources.size(); ++j) {
        try {
            aligned.push_back(align_source_doe(sources[j].doe, spec.variables));
            index.push_back(j);
        } catch (const AlignmentError& e) {
            spdlog::warn("dropping source '{}': {}", sources[j].name, e.what());
        }
    }

    SourceCache cache;
    for (std::size_t a = 0; a < aligned.size(); ++a) {
        const auto& src = sources[index[a]];
        if (auto gp = train_source(aligned[a], -1, source_kernel_for(config, aligned[a]), config, index[a], src.name))
            cache.objective.push_back({src.name, std::move(gp)});
    }

    std::vector<Doe> aligned_does;
    for (const auto& a : aligned) aligned_does.push_back(a.doe);
    const auto matches = match_constraints(spec.constraints, aligned_does);
    std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const GpModel>> trained;
    for (const auto& m : matches) {
        std::vector<CachedSource> members;
        for (const auto& ref : m.columns) {
            const auto key = std::make_pair(ref.source, ref.column);
            const auto& src = sources[index[ref.source]];
            const std::string name = src.name + ":" + aligned[ref.source].doe.constraint(ref.column).meta.name;
            auto it = trained.find(key);
            if (it == trained.end()) {
                auto gp = train_source(aligned[ref.source], static_cast<int>(ref.column),
                                       source_kernel_for(config, aligned[ref.source]), config, index[ref.source], name);
                it = trained.emplace(key, std::move(gp)).first;
            }
            if (it->second) members.push_back({name, it->second});
        }
        cache.constraints.push_back(std::move(members));
    }
    return cache;
}

std::vector<NamedSource> named(const std::vector<CachedSource>& cached) {
    std::vector<NamedSource> out;
    for (const auto& c : cached) out.push_back({c.name, c.gp});
    return out;
}

} // namespace

RunHistory run_vbo(const ProblemSpec& spec, const Doe& initial_doe, const OptimizerConfig& config) {
    return run_loop(spec, initial_doe, config, "VBO", [&](int i, const Doe& doe, IterationRecord& rec) {
        rec.transfer_step = false;
        return vbo_step(spec, doe, config, i);
    });
}

RunHistory run_tlbo(const ProblemSpec& spec, const std::vector<SourceProblem>& sources, const Doe& initial_doe,
                    const OptimizerConfig& config) {
    if (sources.empty()) throw ConfigError("TLBO needs at least one source DOE");
    config.validate();
    check_initial(spec, initial_doe);
    const SourceCache cache = build_source_cache(spec, sources, config);
    bool any = !cache.objective.empty();
    for (const auto& c : cache.constraints) any = any || !c.empty();
    if (!any) spdlog::warn("TLBO: no usable source model, behaving as VBO");

    // frozen[0] is the objective, frozen[j + 1] constraint j
    std::vector<std::optional<std::vector<double>>> frozen(1 + spec.constraints.size());
    const std::string method = std::string("TLBO-ETL-") + std::string(to_string(config.variance_policy));

    return run_loop(spec, initial_doe, config, method, [&](int i, const Doe& doe, IterationRecord& rec) {
        const bool vbo = config.alternation_interval && i % *config.alternation_interval == 0;
        if (vbo) {
            rec.transfer_step = false;
            return vbo_step(spec, doe, config, i);
        }
        rec.transfer_step = true;
        const auto targets = train_targets(doe, config, i);
        auto ensemble_for = [&](std::size_t slot, const std::vector<CachedSource>& members,
                                std::shared_ptr<const GpModel> target, const CriteriaConfig& criteria) {
            EnsembleConfig ec;
            ec.criteria = criteria;
            ec.variance_policy = config.variance_policy;
            ec.include_target_member = config.include_target_member;
            ec.fixed_probabilities = frozen[slot];
            auto e = build_ensemble(named(members), std::move(target), ec);
            if (config.freeze_probabilities_after && i == *config.freeze_probabilities_after)
                frozen[slot] = e.probabilities();
            return e;
        };
        const auto objective = ensemble_for(0, cache.objective, targets.objective, config.objective_criteria);
        rec.ensembles.push_back(diagnostics_of("objective", objective));
        std::vector<EnsembleSurrogate> constraints;
        constraints.reserve(spec.constraints.size());
        for (std::size_t j = 0; j < spec.constraints.size(); ++j) {
            constraints.push_back(
                ensemble_for(j + 1, cache.constraints[j], targets.constraints[j], config.constraint_criteria));
            rec.ensembles.push_back(diagnostics_of(spec.constraints[j].name, constraints.back()));
        }
        std::vector<const Surrogate*> cons;
        for (const auto& c : constraints) cons.push_back(&c);
        return maximize_constrained(objective, cons, spec.variables, incumbent(doe), config.acquisition,
                                    derive_seed(config.seed, "acquisition", static_cast<std::uint64_t>(i)))
            .x;
    });
}

RunHistory run_optimizer(const ProblemSpec& spec, const std::vector<SourceProblem>& sources, const Doe& initial_doe,
                         const OptimizerConfig& config) {
    return config.mode == OptimizerMode::tlbo ? run_tlbo(spec, sources, initial_doe, config)
                                              : run_vbo(spec, initial_doe, config);
}

} // namespace xferbo
