// Command-line front end: evaluates first-passage moments, demand tail
// probabilities, expected inventory costs, and the matching Monte Carlo
// estimates for a JSON-configured demand model and reorder policy.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levy/config.hpp"
#include "levy/cost_engine.hpp"
#include "levy/demand_distribution.hpp"
#include "levy/errors.hpp"
#include "levy/first_passage.hpp"
#include "levy/format.hpp"
#include "levy/monte_carlo.hpp"

namespace {

using levy::format_double;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Overrides {
  std::string config_path;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> paths;
  std::optional<double> horizon;   // --t
  std::optional<std::int64_t> n;   // moments
  std::optional<double> s;         // tail
  std::optional<double> b;         // tail
  std::optional<std::string> grid_a;
  std::optional<std::string> grid_q;
  std::optional<std::string> checkpoints;
};

levy::RunConfig load_with_overrides(const Overrides& ov) {
  levy::RunConfig cfg = levy::load_config_file(ov.config_path);
  if (ov.seed) cfg.mc.seed = *ov.seed;
  // the estimators enforce their own floor on cfg.mc.paths; simulate reads
  // the raw override as a dump count instead
  if (ov.paths) cfg.mc.paths = *ov.paths;
  if (ov.horizon) {
    if (!(*ov.horizon > 0.0)) throw levy::ConfigError("--t must be > 0");
    cfg.mc.horizon = *ov.horizon;
  }
  if (ov.format) {
    if (*ov.format == "csv") {
      cfg.output.format = levy::OutputOptions::Format::csv;
    } else if (*ov.format == "json") {
      cfg.output.format = levy::OutputOptions::Format::json;
    } else {
      throw levy::ConfigError("--format must be \"csv\" or \"json\"");
    }
  }
  if (ov.out) cfg.output.path = *ov.out;
  return cfg;
}

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw levy::ConfigError(flag + ": cannot parse \"" + item + "\" as a number");
    }
  }
  if (out.empty()) throw levy::ConfigError(flag + ": grid must be nonempty");
  return out;
}

void write_artifact(const levy::OutputOptions& output, const std::string& body) {
  if (output.path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream file(output.path, std::ios::binary | std::ios::trunc);
  if (!file) throw levy::ConfigError("cannot open output path \"" + output.path + "\"");
  file << body;
}

ojson estimate_json(const levy::McEstimate& e) {
  return ojson{{"mean", e.mean},
               {"std_error", e.std_error},
               {"ci_low", e.ci_low},
               {"ci_high", e.ci_high},
               {"paths", e.paths_used}};
}

std::string ci_verdict(double value, const levy::McEstimate& e) {
  return value >= e.ci_low && value <= e.ci_high ? "within_ci" : "outside_ci";
}

void append_estimate_csv(std::string& row, const levy::McEstimate& e) {
  row += format_double(e.mean) + "," + format_double(e.std_error) + "," +
         format_double(e.ci_low) + "," + format_double(e.ci_high);
}

int run_moments(const Overrides& ov) {
  const levy::RunConfig cfg = load_with_overrides(ov);
  const std::int64_t n = ov.n.value_or(1);
  if (n < 1) throw levy::ConfigError("--n must be >= 1");
  const levy::FptMoments closed = levy::fpt_moments(cfg.model, cfg.policy, n);
  const levy::FptMomentEstimates mc =
      levy::estimate_fpt_moments(cfg.model, cfg.policy, n, cfg.mc);
  if (cfg.output.format == levy::OutputOptions::Format::csv) {
    std::string body =
        "quantity,n,closed_form,mc_mean,mc_std_error,mc_ci_low,mc_ci_high,verdict\n";
    body += "mean," + std::to_string(n) + "," + format_double(closed.mean) + ",";
    append_estimate_csv(body, mc.mean);
    body += "," + ci_verdict(closed.mean, mc.mean) + "\n";
    body += "variance," + std::to_string(n) + "," + format_double(closed.variance) + ",";
    append_estimate_csv(body, mc.variance);
    body += "," + ci_verdict(closed.variance, mc.variance) + "\n";
    write_artifact(cfg.output, body);
  } else {
    ojson doc{{"subcommand", "moments"},
              {"n", n},
              {"closed_form", {{"mean", closed.mean}, {"variance", closed.variance}}},
              {"mc", {{"mean", estimate_json(mc.mean)},
                      {"variance", estimate_json(mc.variance)}}},
              {"verdict", {{"mean", ci_verdict(closed.mean, mc.mean)},
                           {"variance", ci_verdict(closed.variance, mc.variance)}}}};
    write_artifact(cfg.output, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int run_tail(const Overrides& ov) {
  const levy::RunConfig cfg = load_with_overrides(ov);
  if (!ov.s || !ov.b) throw levy::ConfigError("tail requires --s and --b");
  const double s = *ov.s, b = *ov.b;
  const double series = levy::demand_tail(cfg.model, s, b, cfg.series);
  const levy::McEstimate mc = levy::estimate_tail(cfg.model, s, b, cfg.mc);
  if (cfg.output.format == levy::OutputOptions::Format::csv) {
    std::string body = "s,b,series,mc_mean,mc_std_error,mc_ci_low,mc_ci_high,verdict\n";
    body += format_double(s) + "," + format_double(b) + "," + format_double(series) + ",";
    append_estimate_csv(body, mc);
    body += "," + ci_verdict(series, mc) + "\n";
    write_artifact(cfg.output, body);
  } else {
    ojson doc{{"subcommand", "tail"},
              {"s", s},
              {"b", b},
              {"series", series},
              {"mc", estimate_json(mc)},
              {"verdict", ci_verdict(series, mc)}};
    write_artifact(cfg.output, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int run_cost(const Overrides& ov) {
  const levy::RunConfig cfg = load_with_overrides(ov);
  const double t = cfg.mc.horizon;
  const levy::CostBreakdown analytic = levy::expected_total_cost(
      cfg.model, cfg.policy, cfg.rates, t, cfg.series, cfg.quadrature);
  const levy::McCostBreakdown mc =
      levy::estimate_cost(cfg.model, cfg.policy, cfg.rates, t, cfg.mc);
  if (cfg.output.format == levy::OutputOptions::Format::csv) {
    std::string body =
        "component,t,analytic,mc_mean,mc_std_error,mc_ci_low,mc_ci_high\n";
    const auto row = [&](const char* name, double a, const levy::McEstimate& e) {
      std::string r = std::string(name) + "," + format_double(t) + "," +
                      format_double(a) + ",";
      append_estimate_csv(r, e);
      return r + "\n";
    };
    body += row("ordering", analytic.ordering, mc.ordering);
    body += row("holding", analytic.holding, mc.holding);
    body += row("stockout", analytic.stockout, mc.stockout);
    body += row("total", analytic.total, mc.total);
    write_artifact(cfg.output, body);
  } else {
    ojson doc{{"subcommand", "cost"},
              {"t", t},
              {"analytic", {{"ordering", analytic.ordering},
                            {"holding", analytic.holding},
                            {"stockout", analytic.stockout},
                            {"total", analytic.total}}},
              {"mc", {{"ordering", estimate_json(mc.ordering)},
                      {"holding", estimate_json(mc.holding)},
                      {"stockout", estimate_json(mc.stockout)},
                      {"total", estimate_json(mc.total)}}}};
    write_artifact(cfg.output, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int run_longrun(const Overrides& ov) {
  const levy::RunConfig cfg = load_with_overrides(ov);
  const double limit =
      levy::long_run_average_cost(cfg.model, cfg.rates, cfg.policy.initial_stock);
  std::vector<double> checkpoints =
      parse_grid(ov.checkpoints.value_or("10,50"), "--checkpoints");
  for (double t : checkpoints) {
    if (!(t > 0.0)) throw levy::ConfigError("--checkpoints entries must be > 0");
  }
  std::vector<double> averages;
  averages.reserve(checkpoints.size());
  for (double t : checkpoints) {
    const levy::CostBreakdown c = levy::expected_total_cost(
        cfg.model, cfg.policy, cfg.rates, t, cfg.series, cfg.quadrature);
    averages.push_back(c.total / t);
  }
  if (cfg.output.format == levy::OutputOptions::Format::csv) {
    std::string body = "t,average_cost_per_time,long_run_limit\n";
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      body += format_double(checkpoints[i]) + "," + format_double(averages[i]) + "," +
              format_double(limit) + "\n";
    }
    write_artifact(cfg.output, body);
  } else {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      rows.push_back(ojson{{"t", checkpoints[i]}, {"average_cost_per_time", averages[i]}});
    }
    ojson doc{{"subcommand", "longrun"}, {"long_run_limit", limit}, {"trace", rows}};
    write_artifact(cfg.output, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int run_simulate(const Overrides& ov) {
  levy::RunConfig cfg = load_with_overrides(ov);
  // event dumps get one path unless --paths asks for more
  const std::int64_t paths = ov.paths.value_or(1);
  if (paths < 1) throw levy::ConfigError("--paths must be >= 1");
  const double horizon = cfg.mc.horizon;
  const auto source_name = [](levy::PathEvent::Source s) {
    return s == levy::PathEvent::Source::unit_jump ? "unit_jump" : "compound_jump";
  };
  if (cfg.output.format == levy::OutputOptions::Format::csv) {
    std::string body = "path_id,time,jump_size,source\n";
    for (std::int64_t p = 0; p < paths; ++p) {
      levy::Rng rng = levy::Rng::for_path(cfg.mc.seed, static_cast<std::uint64_t>(p));
      for (const auto& e : levy::simulate_path(cfg.model, horizon, rng)) {
        body += std::to_string(p) + "," + format_double(e.time) + "," +
                format_double(e.jump_size) + "," + source_name(e.source) + "\n";
      }
    }
    write_artifact(cfg.output, body);
  } else {
    ojson events = ojson::array();
    for (std::int64_t p = 0; p < paths; ++p) {
      levy::Rng rng = levy::Rng::for_path(cfg.mc.seed, static_cast<std::uint64_t>(p));
      for (const auto& e : levy::simulate_path(cfg.model, horizon, rng)) {
        events.push_back(ojson{{"path_id", p},
                               {"time", e.time},
                               {"jump_size", e.jump_size},
                               {"source", source_name(e.source)}});
      }
    }
    ojson doc{{"subcommand", "simulate"}, {"horizon", horizon}, {"events", events}};
    write_artifact(cfg.output, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int run_sweep(const Overrides& ov) {
  const levy::RunConfig cfg = load_with_overrides(ov);
  if (!ov.grid_a || !ov.grid_q) throw levy::ConfigError("sweep requires --grid-a and --grid-q");
  const std::vector<double> grid_a = parse_grid(*ov.grid_a, "--grid-a");
  const std::vector<double> grid_q = parse_grid(*ov.grid_q, "--grid-q");
  const double t = cfg.mc.horizon;
  const levy::SweepResult result =
      levy::cost_sweep(cfg.model, cfg.rates, cfg.policy.initial_stock, grid_a, grid_q,
                       t, cfg.series, cfg.quadrature);
  if (cfg.output.format == levy::OutputOptions::Format::csv) {
    std::string body = "a,Q,t,ordering,holding,stockout,total\n";
    for (const auto& cell : result.cells) {
      body += format_double(cell.reorder_offset) + "," +
              format_double(cell.order_quantity) + "," + format_double(t) + ",";
      if (cell.ok) {
        body += format_double(cell.cost.ordering) + "," +
                format_double(cell.cost.holding) + "," +
                format_double(cell.cost.stockout) + "," +
                format_double(cell.cost.total) + "\n";
      } else {
        body += "nan,nan,nan,nan\n";
      }
    }
    if (result.argmin) {
      const auto& best = result.cells[*result.argmin];
      body += "# argmin a=" + format_double(best.reorder_offset) +
              " Q=" + format_double(best.order_quantity) +
              " total=" + format_double(best.cost.total) + "\n";
    } else {
      body += "# argmin none\n";
    }
    write_artifact(cfg.output, body);
  } else {
    ojson rows = ojson::array();
    for (const auto& cell : result.cells) {
      ojson row{{"a", cell.reorder_offset}, {"Q", cell.order_quantity}, {"t", t}};
      if (cell.ok) {
        row["ordering"] = cell.cost.ordering;
        row["holding"] = cell.cost.holding;
        row["stockout"] = cell.cost.stockout;
        row["total"] = cell.cost.total;
      } else {
        row["error"] = cell.error;
      }
      rows.push_back(row);
    }
    ojson doc{{"subcommand", "sweep"}, {"t", t}, {"cells", rows}};
    if (result.argmin) {
      const auto& best = result.cells[*result.argmin];
      doc["argmin"] = ojson{{"a", best.reorder_offset},
                            {"Q", best.order_quantity},
                            {"total", best.cost.total}};
    } else {
      doc["argmin"] = nullptr;
    }
    write_artifact(cfg.output, doc.dump(2) + "\n");
  }
  return kExitOk;
}

// Failures are reported on stderr; JSON mode additionally emits a
// machine-readable error object on stdout.
int report_error(const Overrides& ov, const char* code, const std::string& message,
                 int exit_code) {
  std::cerr << "error (" << code << "): " << message << "\n";
  if (ov.format && *ov.format == "json") {
    ojson doc{{"error", {{"code", code}, {"message", message}}}};
    std::cout << doc.dump(2) << "\n";
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage, demand-tail, and inventory-cost calculator for "
               "drift + Poisson + compound-Poisson demand"};
  app.require_subcommand(1);

  Overrides ov;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", ov.config_path, "JSON config file")->required();
    cmd->add_option("--format", ov.format, "Output format: csv or json");
    cmd->add_option("--out", ov.out, "Output path ('-' for stdout)");
    cmd->add_option("--seed", ov.seed, "Master RNG seed override");
    cmd->add_option("--paths", ov.paths, "Monte Carlo path count override");
    cmd->add_option("--t", ov.horizon, "Horizon override");
  };

  CLI::App* moments = app.add_subcommand(
      "moments", "Closed-form first-passage moments vs Monte Carlo");
  add_common(moments);
  moments->add_option("--n", ov.n, "Reorder index (default 1)");

  CLI::App* tail =
      app.add_subcommand("tail", "Series demand tail P(D_s >= b) vs Monte Carlo");
  add_common(tail);
  tail->add_option("--s", ov.s, "Time point")->required();
  tail->add_option("--b", ov.b, "Demand level")->required();

  CLI::App* cost =
      app.add_subcommand("cost", "Analytic finite-horizon cost vs Monte Carlo");
  add_common(cost);

  CLI::App* longrun =
      app.add_subcommand("longrun", "Long-run average cost and finite-t trace");
  add_common(longrun);
  longrun->add_option("--checkpoints", ov.checkpoints,
                      "Comma-separated t values (default 10,50)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Dump simulated demand paths as events");
  add_common(simulate);

  CLI::App* sweep = app.add_subcommand("sweep", "Cost over an (a, Q) policy grid");
  add_common(sweep);
  sweep->add_option("--grid-a", ov.grid_a, "Comma-separated reorder offsets")
      ->required();
  sweep->add_option("--grid-q", ov.grid_q, "Comma-separated order quantities")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (moments->parsed()) return run_moments(ov);
    if (tail->parsed()) return run_tail(ov);
    if (cost->parsed()) return run_cost(ov);
    if (longrun->parsed()) return run_longrun(ov);
    if (simulate->parsed()) return run_simulate(ov);
    if (sweep->parsed()) return run_sweep(ov);
  } catch (const levy::ConfigError& e) {
    return report_error(ov, "validation", e.what(), kExitValidation);
  } catch (const std::invalid_argument& e) {
    return report_error(ov, "validation", e.what(), kExitValidation);
  } catch (const std::domain_error& e) {
    return report_error(ov, "validation", e.what(), kExitValidation);
  } catch (const levy::SeriesCapError& e) {
    return report_error(ov, "series_cap", e.what(), kExitNumerical);
  } catch (const levy::NonConvergenceError& e) {
    return report_error(ov, "non_convergence", e.what(), kExitNumerical);
  }
  return kExitValidation;
}
