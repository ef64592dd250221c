#pragma once

#include <map>
#include <string>

#include "plantlab/harness.hpp"

namespace plantlab {

// Flat key = value configuration text. '#' starts a comment; blank lines are
// ignored; keys are case-sensitive. A `kind` key selects the problem.
// Detector parameters are namespaced as `detector.<param>`. Every key must
// be consumed by the schema — unknown keys throw Error{ConfigError} so
// typos cannot silently fall back to defaults.
ExperimentConfig parse_experiment_config(const std::string& text);

// Inverse of parse_experiment_config: emits a canonical text form that
// parses back to an identical config (round-trip property).
std::string write_experiment_config(const ExperimentConfig& config);

// Low-level helpers shared with the CLI.
std::map<std::string, std::string> parse_kv_text(const std::string& text);

}  // namespace plantlab
