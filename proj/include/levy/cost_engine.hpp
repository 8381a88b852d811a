#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levy/demand_distribution.hpp"
#include "levy/demand_model.hpp"

namespace levy {

struct QuadratureControl {
  enum class Scheme { trapezoid, simpson };
  std::int64_t nodes = 256;  // interval budget for the time integral, >= 8
  Scheme scheme = Scheme::simpson;
  bool operator==(const QuadratureControl&) const = default;
};

struct CostBreakdown {
  double ordering = 0.0;
  double holding = 0.0;
  double stockout = 0.0;  // identically 0 on the analytic path
  double total = 0.0;
  double horizon = 0.0;
};

// E[X_t] = x - m*t + Q*E[R_t]; t = 0 returns the initial stock.
double expected_inventory_level(const DemandModel& model, const Policy& policy,
                                double t, const SeriesControl& series = {});

// Finite-horizon expected cost:
//   ordering = c_o * Q * E[R_t]
//   holding  = c_h * (x*t - m*t^2/2 + Q * integral_0^t E[R_s] ds)
// The stockout term vanishes because inventory stays above x - a after each
// reorder is booked, so it is reported as exactly 0.
CostBreakdown expected_total_cost(const DemandModel& model, const Policy& policy,
                                  const CostRates& rates, double t,
                                  const SeriesControl& series = {},
                                  const QuadratureControl& quadrature = {});

// lim_{t->inf} E[total cost]/t = c_o * m + c_h * x.
double long_run_average_cost(const DemandModel& model, const CostRates& rates,
                             double initial_stock);

struct SweepCell {
  double reorder_offset = 0.0;
  double order_quantity = 0.0;
  CostBreakdown cost{};
  bool ok = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepCell> cells;       // reorder_offset-major, quantity minor
  std::optional<std::size_t> argmin;  // cheapest ok cell, first on ties
};

// Evaluates the cost grid cell-by-cell; a failing cell is marked rather than
// aborting the sweep. Cell order and argmin tie-breaks are deterministic.
SweepResult cost_sweep(const DemandModel& model, const CostRates& rates,
                       double initial_stock, const std::vector<double>& offset_grid,
                       const std::vector<double>& quantity_grid, double t,
                       const SeriesControl& series = {},
                       const QuadratureControl& quadrature = {});

namespace detail {

// integral_0^t E[R_s] ds. The integrand jumps wherever the zero-jump atom of
// demand crosses a reorder threshold (s = (threshold - alpha*i)/drift), so the
// composite rule is applied piecewise between those points; exposed for the
// node-doubling convergence tests.
double expected_orders_integral(const DemandModel& model, const Policy& policy,
                                double t, const SeriesControl& series,
                                const QuadratureControl& quadrature);

}  // namespace detail

}  // namespace levy
