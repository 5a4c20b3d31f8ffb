#include "xferbo/heterogeneity.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "xferbo/errors.hpp"

namespace xferbo {

bool AlignedSource::has_masks() const { return std::find(mask.begin(), mask.end(), true) != mask.end(); }

bool AlignedSource::heterogeneous() const { return has_masks() || !map.dropped_source_variables.empty(); }

AlignedSource align_source_doe(const Doe& source, std::span<const VariableMeta> target_variables) {
    validate_variables(target_variables);
    const auto& src_vars = source.variables();
    AlignmentMap map;
    map.target_variables.assign(target_variables.begin(), target_variables.end());

    std::vector<bool> used(src_vars.size(), false);
    std::vector<bool> mask;
    std::vector<VariableMeta> vars;
    for (const auto& tv : target_variables) {
        VariableAlignment va{tv.name, std::nullopt};
        for (std::size_t j = 0; j < src_vars.size(); ++j) {
            if (!used[j] && names_match(src_vars[j].name, tv.name)) {
                va.source_column = j;
                used[j] = true;
                break;
            }
        }
        VariableMeta meta = tv;
        if (va.source_column) {
            const auto& sv = src_vars[*va.source_column];
            meta.lower = std::min(tv.lower, sv.lower);
            meta.upper = std::max(tv.upper, sv.upper);
        }
        mask.push_back(!va.source_column.has_value());
        vars.push_back(std::move(meta));
        map.variables.push_back(std::move(va));
    }
    for (std::size_t j = 0; j < src_vars.size(); ++j)
        if (!used[j]) map.dropped_source_variables.push_back(src_vars[j].name);
    if (std::all_of(mask.begin(), mask.end(), [](bool m) { return m; }))
        throw AlignmentError("source shares no design variable with the target");

    const auto n = static_cast<Eigen::Index>(source.size());
    Eigen::MatrixXd inputs(n, static_cast<Eigen::Index>(target_variables.size()));
    for (std::size_t d = 0; d < target_variables.size(); ++d) {
        const auto col = static_cast<Eigen::Index>(d);
        if (const auto& sc = map.variables[d].source_column)
            inputs.col(col) = source.inputs().col(static_cast<Eigen::Index>(*sc));
        else
            inputs.col(col).setConstant(target_variables[d].midpoint());
    }
    return AlignedSource{Doe(std::move(vars), std::move(inputs), source.objective(), source.constraints()),
                         std::move(mask), std::move(map)};
}

GpModel build_masked_source_gp(const AlignedSource& aligned, int column, const GpConfig& config) {
    return train_gp(aligned.doe, column, KernelKind::kpls, config, aligned.mask);
}

std::string_view to_string(MatchTier tier) {
    switch (tier) {
    case MatchTier::name: return "name";
    case MatchTier::category: return "category";
    case MatchTier::broad: return "broad";
    case MatchTier::none: return "none";
    }
    return "none";
}

std::vector<ConstraintMatch> match_constraints(std::span<const ConstraintMeta> target_constraints,
                                               std::span<const Doe> source_does) {
    std::vector<ConstraintMatch> out;
    for (const auto& tc : target_constraints) {
        ConstraintMatch m{tc.name, MatchTier::none, {}};
        auto collect = [&](auto&& pred) {
            std::vector<ConstraintSourceRef> refs;
            for (std::size_t s = 0; s < source_does.size(); ++s) {
                const auto& cons = source_does[s].constraints();
                for (std::size_t c = 0; c < cons.size(); ++c)
                    if (pred(cons[c].meta)) refs.push_back({s, c});
            }
            return refs;
        };
        if (auto refs = collect([&](const ConstraintMeta& sc) { return names_match(sc.name, tc.name); });
            !refs.empty()) {
            m.tier = MatchTier::name;
            m.columns = std::move(refs);
        } else if (auto refs2 = collect([&](const ConstraintMeta& sc) { return sc.category == tc.category; });
                   !refs2.empty()) {
            m.tier = MatchTier::category;
            m.columns = std::move(refs2);
        } else if (auto refs3 = collect([](const ConstraintMeta&) { return true; }); !refs3.empty()) {
            spdlog::warn("constraint '{}': no name or category match, using every source constraint (broad match)",
                         tc.name);
            m.tier = MatchTier::broad;
            m.columns = std::move(refs3);
        }
        out.push_back(std::move(m));
    }
    return out;
}

nlohmann::json alignment_report(std::span<const std::string> source_names, std::span<const AlignedSource> aligned,
                                std::span<const std::string> target_constraint_names,
                                std::span<const ConstraintMatch> matches) {
    nlohmann::json doc;
    doc["sources"] = nlohmann::json::array();
    for (std::size_t s = 0; s < aligned.size(); ++s) {
        nlohmann::json matched = nlohmann::json::array(), masked = nlohmann::json::array();
        for (const auto& va : aligned[s].map.variables) (va.source_column ? matched : masked).push_back(va.target_name);
        doc["sources"].push_back({{"name", s < source_names.size() ? source_names[s] : std::to_string(s)},
                                  {"matched", matched},
                                  {"masked", masked},
                                  {"dropped", aligned[s].map.dropped_source_variables}});
    }
    doc["constraints"] = nlohmann::json::array();
    for (std::size_t i = 0; i < matches.size(); ++i) {
        nlohmann::json cols = nlohmann::json::array();
        for (const auto& r : matches[i].columns) {
            const auto& name = r.source < source_names.size() ? source_names[r.source] : std::to_string(r.source);
            std::string col_name = std::to_string(r.column);
            if (r.source < aligned.size()) col_name = aligned[r.source].doe.constraint(r.column).meta.name;
            cols.push_back({{"source", name}, {"constraint", col_name}});
        }
        doc["constraints"].push_back(
            {{"target", i < target_constraint_names.size() ? target_constraint_names[i] : matches[i].target_name},
             {"tier", std::string(to_string(matches[i].tier))},
             {"columns", cols}});
    }
    return doc;
}

} // namespace xferbo
