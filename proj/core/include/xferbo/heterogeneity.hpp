#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xferbo/doe.hpp"
#include "xferbo/gp.hpp"

namespace xferbo {

struct VariableAlignment {
    std::string target_name;
    /// Column in the source DOE, or empty when the variable is masked.
    std::optional<std::size_t> source_column;
};

struct AlignmentMap {
    std::vector<VariableMeta> target_variables;
    std::vector<VariableAlignment> variables;
    std::vector<std::string> dropped_source_variables;
};

/// A source DOE re-expressed over the target's variables.
struct AlignedSource {
    /// Target variable order; bounds are the union of source and target bounds for matched
    /// variables and the target bounds for masked ones.
    Doe doe;
    /// true = variable absent from the source (filled with the target midpoint).
    std::vector<bool> mask;
    AlignmentMap map;

    bool has_masks() const;
    /// Any masked or dropped variable.
    bool heterogeneous() const;
};

/// Matches target variables to source columns by case-insensitive name. Missing variables are
/// filled with the target-bounds midpoint and masked; source-only variables are dropped.
/// Throws AlignmentError if no variable is shared.
AlignedSource align_source_doe(const Doe& source, std::span<const VariableMeta> target_variables);

/// KPLS GP on an aligned DOE whose weights are zero on masked variables. `column` < 0 selects
/// the objective, otherwise a constraint column of the aligned DOE.
GpModel build_masked_source_gp(const AlignedSource& aligned, int column, const GpConfig& config);

struct ConstraintSourceRef {
    std::size_t source = 0;
    std::size_t column = 0;

    bool operator==(const ConstraintSourceRef&) const = default;
};

enum class MatchTier { name, category, broad, none };
std::string_view to_string(MatchTier tier);

struct ConstraintMatch {
    std::string target_name;
    MatchTier tier = MatchTier::none;
    std::vector<ConstraintSourceRef> columns;
};

/// Per target constraint: all source columns with an equal name; failing that, all with an
/// equal category; failing that, every source constraint column (with a warning).
/// `none` only when no source has any constraint.
std::vector<ConstraintMatch> match_constraints(std::span<const ConstraintMeta> target_constraints,
                                               std::span<const Doe> source_does);

nlohmann::json alignment_report(std::span<const std::string> source_names, std::span<const AlignedSource> aligned,
                                std::span<const std::string> target_constraint_names,
                                std::span<const ConstraintMatch> matches);

} // namespace xferbo
