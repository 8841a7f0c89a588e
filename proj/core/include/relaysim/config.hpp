#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaysim/engine.hpp"

namespace relaysim {

// Schema or semantic problem in an experiment file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::none;
  std::vector<double> values;
};

struct Experiment {
  std::string name;
  SimConfig config;
  SweepSpec sweep;
};

// Parses and validates an experiment file (JSON, schema_version 1). Unknown
// keys are rejected; defaults are applied as documented in the README.
std::vector<Experiment> parse_config(const std::filesystem::path& path);

// Parses from a string (same schema); `origin` names the source in errors.
std::vector<Experiment> parse_config_text(const std::string& text,
                                          const std::string& origin);

// Serializes experiments back to the schema; parse(serialize(x)) == x.
std::string serialize_config(const std::vector<Experiment>& experiments);

}  // namespace relaysim
