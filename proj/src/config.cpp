#include "levy/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace levy {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

std::string join_path(const std::string& scope, const std::string& key) {
  return scope.empty() ? key : scope + "." + key;
}

void check_keys(const json& obj, const std::string& scope,
                std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail("unknown config key \"" + join_path(scope, it.key()) + "\"");
  }
}

const json* find(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_object(const json& obj, const std::string& scope,
                           const std::string& key) {
  const json* v = find(obj, key);
  if (!v) fail("missing config section \"" + join_path(scope, key) + "\"");
  if (!v->is_object()) fail("\"" + join_path(scope, key) + "\" must be an object");
  return *v;
}

double get_number(const json& obj, const std::string& scope, const std::string& key,
                  double fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) fail("\"" + join_path(scope, key) + "\" must be a number");
  return v->get<double>();
}

double require_number(const json& obj, const std::string& scope,
                      const std::string& key) {
  const json* v = find(obj, key);
  if (!v) fail("missing config key \"" + join_path(scope, key) + "\"");
  if (!v->is_number()) fail("\"" + join_path(scope, key) + "\" must be a number");
  return v->get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& scope,
                         const std::string& key, std::int64_t fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) {
    fail("\"" + join_path(scope, key) + "\" must be an integer");
  }
  return v->get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& scope,
                       const std::string& key, const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) fail("\"" + join_path(scope, key) + "\" must be a string");
  return v->get<std::string>();
}

void require_nonneg(double v, const std::string& path) {
  if (!std::isfinite(v) || v < 0.0) fail("\"" + path + "\" must be finite and >= 0");
}

void require_positive(double v, const std::string& path) {
  if (!std::isfinite(v) || !(v > 0.0)) fail("\"" + path + "\" must be finite and > 0");
}

DemandModel parse_model(const json& node) {
  check_keys(node, "model",
             {"drift", "unit_jump_size", "unit_jump_rate", "compound_rate", "jump"});
  const double drift = get_number(node, "model", "drift", 0.0);
  const double size = get_number(node, "model", "unit_jump_size", 0.0);
  const double rate = get_number(node, "model", "unit_jump_rate", 0.0);
  const double compound = get_number(node, "model", "compound_rate", 0.0);
  require_nonneg(drift, "model.drift");
  require_nonneg(size, "model.unit_jump_size");
  require_nonneg(rate, "model.unit_jump_rate");
  require_nonneg(compound, "model.compound_rate");

  std::optional<JumpDistribution> jump;
  if (const json* jn = find(node, "jump")) {
    if (!jn->is_object()) fail("\"model.jump\" must be an object");
    const std::string kind = get_string(*jn, "model.jump", "kind", "");
    if (kind == "exponential") {
      check_keys(*jn, "model.jump", {"kind", "rate"});
      const double eta = require_number(*jn, "model.jump", "rate");
      require_positive(eta, "model.jump.rate");
      jump = JumpDistribution::exponential(eta);
    } else if (kind == "gamma") {
      check_keys(*jn, "model.jump", {"kind", "shape", "rate"});
      const double shape = require_number(*jn, "model.jump", "shape");
      const double eta = require_number(*jn, "model.jump", "rate");
      require_positive(shape, "model.jump.shape");
      require_positive(eta, "model.jump.rate");
      jump = JumpDistribution::gamma(shape, eta);
    } else {
      fail("\"model.jump.kind\" must be \"exponential\" or \"gamma\"");
    }
  }
  if ((compound > 0.0) != jump.has_value()) {
    fail("\"model.jump\" must be present exactly when \"model.compound_rate\" > 0");
  }
  if (!(drift + size * rate + compound > 0.0)) {
    fail("degenerate model: \"model.drift\" + size*rate + \"model.compound_rate\" "
         "must be > 0");
  }
  try {
    return DemandModel(drift, size, rate, compound, jump);
  } catch (const std::invalid_argument& e) {
    fail(std::string("model: ") + e.what());
  }
}

Policy parse_policy(const json& node) {
  check_keys(node, "policy", {"initial_stock", "reorder_offset", "order_quantity"});
  const double x = require_number(node, "policy", "initial_stock");
  const double a = require_number(node, "policy", "reorder_offset");
  const double q = require_number(node, "policy", "order_quantity");
  require_positive(x, "policy.initial_stock");
  require_positive(a, "policy.reorder_offset");
  require_positive(q, "policy.order_quantity");
  return Policy(x, a, q);
}

CostRates parse_rates(const json* node) {
  if (!node) return CostRates{};
  check_keys(*node, "rates", {"ordering", "holding", "stockout"});
  const double ordering = get_number(*node, "rates", "ordering", 0.0);
  const double holding = get_number(*node, "rates", "holding", 0.0);
  const double stockout = get_number(*node, "rates", "stockout", 0.0);
  require_nonneg(ordering, "rates.ordering");
  require_nonneg(holding, "rates.holding");
  require_nonneg(stockout, "rates.stockout");
  return CostRates(ordering, holding, stockout);
}

SeriesControl parse_series(const json* node) {
  SeriesControl out;
  if (!node) return out;
  check_keys(*node, "series",
             {"tail_mass_tol", "max_unit_index", "max_compound_index",
              "max_replenishments"});
  out.tail_mass_tol = get_number(*node, "series", "tail_mass_tol", out.tail_mass_tol);
  out.max_unit_index = get_integer(*node, "series", "max_unit_index", out.max_unit_index);
  out.max_compound_index =
      get_integer(*node, "series", "max_compound_index", out.max_compound_index);
  out.max_replenishments =
      get_integer(*node, "series", "max_replenishments", out.max_replenishments);
  if (!(out.tail_mass_tol > 0.0) || !(out.tail_mass_tol <= 1e-3)) {
    fail("\"series.tail_mass_tol\" must lie in (0, 1e-3]");
  }
  if (out.max_unit_index < 1) fail("\"series.max_unit_index\" must be >= 1");
  if (out.max_compound_index < 1) fail("\"series.max_compound_index\" must be >= 1");
  if (out.max_replenishments < 1) fail("\"series.max_replenishments\" must be >= 1");
  return out;
}

QuadratureControl parse_quadrature(const json* node) {
  QuadratureControl out;
  if (!node) return out;
  check_keys(*node, "quadrature", {"nodes", "scheme"});
  out.nodes = get_integer(*node, "quadrature", "nodes", out.nodes);
  const std::string scheme = get_string(*node, "quadrature", "scheme", "simpson");
  if (scheme == "simpson") {
    out.scheme = QuadratureControl::Scheme::simpson;
  } else if (scheme == "trapezoid") {
    out.scheme = QuadratureControl::Scheme::trapezoid;
  } else {
    fail("\"quadrature.scheme\" must be \"simpson\" or \"trapezoid\"");
  }
  if (out.nodes < 8) fail("\"quadrature.nodes\" must be >= 8");
  if (out.scheme == QuadratureControl::Scheme::simpson && out.nodes % 2 != 0) {
    fail("\"quadrature.nodes\" must be even for the simpson scheme");
  }
  return out;
}

McConfig parse_mc(const json* node) {
  McConfig out;
  if (!node) return out;
  check_keys(*node, "mc", {"paths", "horizon", "seed", "confidence_level"});
  out.paths = get_integer(*node, "mc", "paths", out.paths);
  out.horizon = get_number(*node, "mc", "horizon", out.horizon);
  if (const json* seed = find(*node, "seed")) {
    // nlohmann stores nonnegative JSON integers as number_unsigned
    if (!seed->is_number_unsigned()) fail("\"mc.seed\" must be a nonnegative integer");
    out.seed = seed->get<std::uint64_t>();
  }
  out.confidence_level = get_number(*node, "mc", "confidence_level", out.confidence_level);
  if (out.paths < 100) fail("\"mc.paths\" must be >= 100");
  if (!(out.horizon > 0.0)) fail("\"mc.horizon\" must be > 0");
  if (!(out.confidence_level > 0.0) || !(out.confidence_level < 1.0)) {
    fail("\"mc.confidence_level\" must lie in (0, 1)");
  }
  return out;
}

OutputOptions parse_output(const json* node) {
  OutputOptions out;
  if (!node) return out;
  check_keys(*node, "output", {"format", "path"});
  const std::string format = get_string(*node, "output", "format", "csv");
  if (format == "csv") {
    out.format = OutputOptions::Format::csv;
  } else if (format == "json") {
    out.format = OutputOptions::Format::json;
  } else {
    fail("\"output.format\" must be \"csv\" or \"json\"");
  }
  out.path = get_string(*node, "output", "path", out.path);
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("config root must be a JSON object");
  check_keys(doc, "",
             {"model", "policy", "rates", "series", "quadrature", "mc", "output"});

  const json& model_node = require_object(doc, "", "model");
  const json& policy_node = require_object(doc, "", "policy");

  return RunConfig{parse_model(model_node),
                   parse_policy(policy_node),
                   parse_rates(find(doc, "rates")),
                   parse_series(find(doc, "series")),
                   parse_quadrature(find(doc, "quadrature")),
                   parse_mc(find(doc, "mc")),
                   parse_output(find(doc, "output"))};
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const RunConfig& config) {
  json doc;
  json model;
  model["drift"] = config.model.drift();
  model["unit_jump_size"] = config.model.unit_jump_size();
  model["unit_jump_rate"] = config.model.unit_jump_rate();
  model["compound_rate"] = config.model.compound_rate();
  if (config.model.jump()) {
    json jump;
    const auto& jd = *config.model.jump();
    jump["kind"] =
        jd.kind == JumpDistribution::Kind::exponential ? "exponential" : "gamma";
    if (jd.kind == JumpDistribution::Kind::gamma) jump["shape"] = jd.shape;
    jump["rate"] = jd.rate;
    model["jump"] = jump;
  }
  doc["model"] = model;

  json policy;
  policy["initial_stock"] = config.policy.initial_stock;
  policy["reorder_offset"] = config.policy.reorder_offset;
  policy["order_quantity"] = config.policy.order_quantity;
  doc["policy"] = policy;

  json rates;
  rates["ordering"] = config.rates.ordering;
  rates["holding"] = config.rates.holding;
  rates["stockout"] = config.rates.stockout;
  doc["rates"] = rates;

  json series;
  series["tail_mass_tol"] = config.series.tail_mass_tol;
  series["max_unit_index"] = config.series.max_unit_index;
  series["max_compound_index"] = config.series.max_compound_index;
  series["max_replenishments"] = config.series.max_replenishments;
  doc["series"] = series;

  json quadrature;
  quadrature["nodes"] = config.quadrature.nodes;
  quadrature["scheme"] =
      config.quadrature.scheme == QuadratureControl::Scheme::simpson ? "simpson"
                                                                     : "trapezoid";
  doc["quadrature"] = quadrature;

  json mc;
  mc["paths"] = config.mc.paths;
  mc["horizon"] = config.mc.horizon;
  mc["seed"] = config.mc.seed;
  mc["confidence_level"] = config.mc.confidence_level;
  doc["mc"] = mc;

  json output;
  output["format"] = config.output.format == OutputOptions::Format::csv ? "csv" : "json";
  output["path"] = config.output.path;
  doc["output"] = output;

  return doc.dump(2) + "\n";
}

}  // namespace levy
