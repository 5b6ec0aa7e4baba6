#pragma once

#include <istream>
#include <string>

#include "ntd/experiment.hpp"

namespace ntd {

// Flat key=value config format, one pair per line.  '#' starts a comment,
// blank lines are ignored.  Unknown keys are a ConfigError so typos fail
// loudly instead of silently running a default.  Keys mirror the fields of
// ExperimentConfig; `classes_per_task` uses ';' between tasks and spaces
// between class indices ("0 1; 2 3"), `seeds` is comma separated, `sampler`
// accepts ntd, reservoir, or both.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

// Serializes a config back into the same key=value format.  Round-trips
// through parse_config.
std::string config_to_text(const ExperimentConfig& config);

}  // namespace ntd
