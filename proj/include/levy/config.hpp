#pragma once

#include <stdexcept>
#include <string>

#include "levy/cost_engine.hpp"
#include "levy/demand_distribution.hpp"
#include "levy/demand_model.hpp"
#include "levy/monte_carlo.hpp"

namespace levy {

// Raised for malformed documents, unknown keys, and invariant violations.
// The message names the offending configuration key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputOptions {
  enum class Format { csv, json };
  Format format = Format::csv;
  std::string path = "-";  // "-" writes to stdout
  bool operator==(const OutputOptions&) const = default;
};

struct RunConfig {
  DemandModel model;
  Policy policy;
  CostRates rates;
  SeriesControl series;
  QuadratureControl quadrature;
  McConfig mc;
  OutputOptions output;
  bool operator==(const RunConfig&) const = default;
};

// Parses a JSON document. `model` and `policy` are required; every other
// section falls back to documented defaults. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

// Canonical JSON emission; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

}  // namespace levy
