#include "xferbo/history.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "xferbo/csv.hpp"

namespace xferbo {

std::vector<double> RunHistory::best_per_iteration() const {
    std::vector<double> out;
    for (const auto& r : records) {
        const auto it = static_cast<std::size_t>(r.iteration);
        if (out.size() <= it) out.resize(it + 1, HUGE_VAL);
        out[it] = r.best_feasible_so_far;
    }
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::min(out[i], out[i - 1]);
    return out;
}

Doe RunHistory::to_doe() const {
    const auto n = static_cast<Eigen::Index>(records.size());
    Eigen::MatrixXd inputs(n, static_cast<Eigen::Index>(variables.size()));
    Eigen::VectorXd obj(n);
    std::vector<ConstraintColumn> cons;
    for (const auto& m : constraints) cons.push_back({m, Eigen::VectorXd(n)});
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = records[static_cast<std::size_t>(i)];
        inputs.row(i) = r.x.transpose();
        obj(i) = r.objective;
        for (std::size_t j = 0; j < cons.size(); ++j) cons[j].values(i) = r.constraints[j];
    }
    return Doe(variables, std::move(inputs), std::move(obj), std::move(cons));
}

std::optional<BestPoint> best_feasible(const RunHistory& history) {
    std::optional<BestPoint> best;
    for (std::size_t i = 0; i < history.records.size(); ++i) {
        const auto& r = history.records[i];
        const bool ok = std::all_of(r.constraints.begin(), r.constraints.end(), [](double c) { return c <= 0.0; });
        if (ok && (!best || r.objective < best->objective)) best = BestPoint{r.x, r.objective, i};
    }
    return best;
}

void update_running_best(RunHistory& history) {
    double best = HUGE_VAL;
    for (auto& r : history.records) {
        r.feasible = std::all_of(r.constraints.begin(), r.constraints.end(), [](double c) { return c <= 0.0; });
        if (r.feasible) best = std::min(best, r.objective);
        r.best_feasible_so_far = best;
    }
}

void write_history_csv(std::ostream& out, const RunHistory& history, double cost_per_eval) {
    out << "iter,best_feasible,objective,feasible,wall_time\n";
    std::size_t evals = 0;
    for (const auto& r : history.records) {
        ++evals;
        out << r.iteration << ',' << format_double(r.best_feasible_so_far) << ',' << format_double(r.objective) << ','
            << (r.feasible ? 1 : 0) << ',' << format_double(cost_per_eval * static_cast<double>(evals)) << '\n';
    }
}

nlohmann::json history_sidecar(const RunHistory& history, bool include_measured_time) {
    nlohmann::json doc;
    doc["method"] = history.method;
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& v : history.variables) vars.push_back(v.name);
    doc["variables"] = vars;
    nlohmann::json cons = nlohmann::json::array();
    for (const auto& c : history.constraints) cons.push_back(c.name);
    doc["constraints"] = cons;
    doc["initial_size"] = history.initial_size;
    doc["failed_evaluations"] = history.failed_evaluations;
    doc["records"] = nlohmann::json::array();
    for (const auto& r : history.records) {
        nlohmann::json rec;
        rec["iter"] = r.iteration;
        rec["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
        rec["objective"] = r.objective;
        rec["constraints"] = r.constraints;
        rec["feasible"] = r.feasible;
        rec["transfer_step"] = r.transfer_step;
        if (include_measured_time) rec["wall_time_seconds"] = r.wall_time_seconds;
        nlohmann::json ens = nlohmann::json::array();
        for (const auto& e : r.ensembles) {
            nlohmann::json srcs = nlohmann::json::array();
            for (const auto& s : e.sources)
                srcs.push_back({{"name", s.name},
                                {"alpha", s.alpha},
                                {"beta", s.beta},
                                {"tau_shape", s.tau_shape},
                                {"tau_accuracy", s.tau_accuracy},
                                {"tau_variance", s.tau_variance},
                                {"probability", s.probability}});
            ens.push_back({{"output", e.output}, {"informative", e.informative}, {"sources", srcs}});
        }
        rec["ensembles"] = ens;
        doc["records"].push_back(std::move(rec));
    }
    return doc;
}

} // namespace xferbo
