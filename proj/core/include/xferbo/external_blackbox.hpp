#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xferbo/doe.hpp"

namespace xferbo {

/// A user problem evaluated by a child process speaking one JSON line per evaluation:
/// `{"x":[...]}` in, `{"objective":f,"constraints":[...]}` out.
struct ExternalDescriptor {
    std::string name = "external";
    /// argv of the child; argv[0] is looked up on PATH.
    std::vector<std::string> command;
    std::vector<VariableMeta> variables;
    std::vector<ConstraintMeta> constraints;
    double timeout_seconds = 60.0;

    /// Throws ConfigError on missing or malformed fields.
    static ExternalDescriptor from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// The child is started on first use and kept alive between evaluations. A timeout, malformed
/// reply or child exit raises EvaluationError and the child is restarted on the next call.
/// Calls are serialized.
ProblemSpec external_blackbox(const ExternalDescriptor& descriptor);

} // namespace xferbo
