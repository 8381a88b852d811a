#include "levy/cost_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levy/parallel.hpp"
#include "levy/special_functions.hpp"

namespace levy {

namespace {

void validate_quadrature(const QuadratureControl& q) {
  if (q.nodes < 8) throw std::invalid_argument("quadrature nodes must be >= 8");
  if (q.scheme == QuadratureControl::Scheme::simpson && q.nodes % 2 != 0) {
    throw std::invalid_argument("simpson quadrature needs an even node count");
  }
}

// Times in (0, t) where E[R_s] is discontinuous: the demand distribution has
// an atom at drift*s + alpha*i (no compound event, i unit jumps), and where
// that atom crosses a threshold the integrand jumps by the atom's mass. Only
// atoms with mass >= kMassFloor matter; the list is capped (largest masses
// kept) so pathological grids cannot blow up the piece count.
std::vector<double> discontinuity_points(const DemandModel& model, const Policy& policy,
                                         double t) {
  std::vector<double> points;
  const double mu = model.drift();
  if (!(mu > 0.0)) return points;  // atom locations are frozen without drift

  constexpr double kMassFloor = 1e-12;
  constexpr std::size_t kMaxPoints = 4096;
  const double lambda = model.has_unit_component() ? model.unit_jump_rate() : 0.0;
  const double alpha = model.has_unit_component() ? model.unit_jump_size() : 0.0;
  const double lambda_c = model.compound_rate();
  const double log_floor = std::log(kMassFloor);

  double s_ub = t;
  if (lambda_c > 0.0) s_ub = std::min(s_ub, -log_floor / lambda_c);
  if (!(s_ub > 0.0)) return points;

  std::int64_t i_max = 0;
  if (lambda > 0.0) {
    const double peak = lambda * s_ub;
    i_max = static_cast<std::int64_t>(peak + 8.5 * std::sqrt(peak + 1.0) + 25.0);
  }

  std::vector<std::pair<double, double>> candidates;  // (mass, s)
  for (std::int64_t i = 0; i <= i_max; ++i) {
    // s-range where poisson_pmf(i, lambda*s) can clear the floor
    double s_lo = 0.0, s_hi = s_ub;
    if (lambda > 0.0) {
      if (i == 0) {
        s_hi = std::min(s_hi, -log_floor / lambda);
      } else {
        const double di = static_cast<double>(i);
        const double w = 8.5 * std::sqrt(di) + 3.0;
        s_lo = std::max(s_lo, (di - w) / lambda);
        s_hi = std::min(s_hi, (di + w) / lambda);
      }
    }
    if (!(s_lo < s_hi)) continue;
    const double level_lo = mu * s_lo + alpha * static_cast<double>(i);
    const double level_hi = mu * s_hi + alpha * static_cast<double>(i);
    const double a = policy.reorder_offset, q = policy.order_quantity;
    auto first_n = static_cast<std::int64_t>(std::ceil((level_lo - a) / q)) + 1;
    auto last_n = static_cast<std::int64_t>(std::floor((level_hi - a) / q)) + 1;
    first_n = std::max<std::int64_t>(first_n, 1);
    for (std::int64_t n = first_n; n <= last_n; ++n) {
      const double s = (policy.threshold(n) - alpha * static_cast<double>(i)) / mu;
      if (!(s > 0.0) || !(s < t)) continue;
      double mass = std::exp(-lambda_c * s);
      if (lambda > 0.0) mass *= poisson_pmf(i, lambda * s);
      if (mass >= kMassFloor) candidates.emplace_back(mass, s);
      if (candidates.size() > 8 * kMaxPoints) break;
    }
    if (candidates.size() > 8 * kMaxPoints) break;
  }
  if (candidates.size() > kMaxPoints) {
    std::nth_element(candidates.begin(), candidates.begin() + kMaxPoints,
                     candidates.end(), [](const auto& x, const auto& y) {
                       return x.first > y.first;
                     });
    candidates.resize(kMaxPoints);
  }
  points.reserve(candidates.size());
  for (const auto& [mass, s] : candidates) points.push_back(s);
  std::sort(points.begin(), points.end());
  const double merge_tol = 1e-12 * std::max(1.0, t);
  std::vector<double> merged;
  for (double s : points) {
    if (merged.empty() || s - merged.back() > merge_tol) merged.push_back(s);
  }
  return merged;
}

}  // namespace

namespace detail {

double expected_orders_integral(const DemandModel& model, const Policy& policy,
                                double t, const SeriesControl& series,
                                const QuadratureControl& quadrature) {
  validate_quadrature(quadrature);
  if (!(t > 0.0)) throw std::domain_error("expected_orders_integral: t must be > 0");

  std::vector<double> edges{0.0};
  for (double s : discontinuity_points(model, policy, t)) edges.push_back(s);
  edges.push_back(t);

  const bool simpson = quadrature.scheme == QuadratureControl::Scheme::simpson;
  const auto pieces = edges.size() - 1;

  // Per-piece interval counts proportional to length (even for Simpson), then
  // a flat node list so evaluations can run in parallel by slot.
  struct Piece {
    double lo = 0.0, hi = 0.0;
    std::int64_t intervals = 0;
    std::size_t first_node = 0;
  };
  std::vector<Piece> plan(pieces);
  std::size_t total_nodes = 0;
  for (std::size_t k = 0; k < pieces; ++k) {
    Piece& p = plan[k];
    p.lo = edges[k];
    p.hi = edges[k + 1];
    const double frac = (p.hi - p.lo) / t;
    auto want = static_cast<std::int64_t>(
        std::ceil(frac * static_cast<double>(quadrature.nodes)));
    if (simpson) {
      want = std::max<std::int64_t>(2, want + (want % 2));
    } else {
      want = std::max<std::int64_t>(1, want);
    }
    p.intervals = want;
    p.first_node = total_nodes;
    total_nodes += static_cast<std::size_t>(want) + 1;
  }

  // The integrand is right-continuous; each piece's upper endpoint is nudged
  // inside so the piece integrates its own branch, not the next one's.
  std::vector<double> abscissae(total_nodes);
  for (const Piece& p : plan) {
    const double h = (p.hi - p.lo) / static_cast<double>(p.intervals);
    const double nudge = 1e-9 * (p.hi - p.lo);
    for (std::int64_t j = 0; j <= p.intervals; ++j) {
      const double s = j == p.intervals ? p.hi - nudge
                                        : p.lo + h * static_cast<double>(j);
      abscissae[p.first_node + static_cast<std::size_t>(j)] = s;
    }
  }

  std::vector<double> values(total_nodes);
  parallel_for(static_cast<std::int64_t>(total_nodes), [&](std::int64_t i) {
    const double s = abscissae[static_cast<std::size_t>(i)];
    values[static_cast<std::size_t>(i)] =
        s <= 0.0 ? 0.0 : expected_orders(model, policy, s, series);
  });

  double integral = 0.0;
  for (const Piece& p : plan) {
    const double h = (p.hi - p.lo) / static_cast<double>(p.intervals);
    const double* f = values.data() + p.first_node;
    double piece = 0.0;
    if (simpson) {
      piece = f[0] + f[p.intervals];
      for (std::int64_t j = 1; j < p.intervals; ++j) {
        piece += f[j] * (j % 2 == 1 ? 4.0 : 2.0);
      }
      piece *= h / 3.0;
    } else {
      piece = 0.5 * (f[0] + f[p.intervals]);
      for (std::int64_t j = 1; j < p.intervals; ++j) piece += f[j];
      piece *= h;
    }
    integral += piece;
  }
  return integral;
}

}  // namespace detail

double expected_inventory_level(const DemandModel& model, const Policy& policy,
                                double t, const SeriesControl& series) {
  if (!(t >= 0.0)) throw std::domain_error("expected_inventory_level: t must be >= 0");
  if (t == 0.0) return policy.initial_stock;
  return policy.initial_stock - mean_rate(model) * t +
         policy.order_quantity * expected_orders(model, policy, t, series);
}

CostBreakdown expected_total_cost(const DemandModel& model, const Policy& policy,
                                  const CostRates& rates, double t,
                                  const SeriesControl& series,
                                  const QuadratureControl& quadrature) {
  validate_quadrature(quadrature);
  if (!(t > 0.0)) throw std::domain_error("expected_total_cost: t must be > 0");
  CostBreakdown out;
  out.horizon = t;
  if (rates.ordering > 0.0) {
    out.ordering = rates.ordering * policy.order_quantity *
                   expected_orders(model, policy, t, series);
  }
  if (rates.holding > 0.0) {
    const double integral =
        detail::expected_orders_integral(model, policy, t, series, quadrature);
    out.holding = rates.holding * (policy.initial_stock * t -
                                   0.5 * mean_rate(model) * t * t +
                                   policy.order_quantity * integral);
  }
  out.stockout = 0.0;
  out.total = out.ordering + out.holding + out.stockout;
  return out;
}

double long_run_average_cost(const DemandModel& model, const CostRates& rates,
                             double initial_stock) {
  if (!(initial_stock > 0.0)) {
    throw std::invalid_argument("long_run_average_cost: initial_stock must be > 0");
  }
  return rates.ordering * mean_rate(model) + rates.holding * initial_stock;
}

SweepResult cost_sweep(const DemandModel& model, const CostRates& rates,
                       double initial_stock, const std::vector<double>& offset_grid,
                       const std::vector<double>& quantity_grid, double t,
                       const SeriesControl& series,
                       const QuadratureControl& quadrature) {
  validate_quadrature(quadrature);
  if (offset_grid.empty() || quantity_grid.empty()) {
    throw std::invalid_argument("cost_sweep: grids must be nonempty");
  }
  for (double a : offset_grid) {
    if (!(a > 0.0)) throw std::invalid_argument("cost_sweep: offsets must be > 0");
  }
  for (double q : quantity_grid) {
    if (!(q > 0.0)) throw std::invalid_argument("cost_sweep: quantities must be > 0");
  }
  if (!(t > 0.0)) throw std::domain_error("cost_sweep: t must be > 0");

  SweepResult result;
  result.cells.resize(offset_grid.size() * quantity_grid.size());
  const auto cols = static_cast<std::int64_t>(quantity_grid.size());
  parallel_for(static_cast<std::int64_t>(result.cells.size()), [&](std::int64_t idx) {
    SweepCell& cell = result.cells[static_cast<std::size_t>(idx)];
    cell.reorder_offset = offset_grid[static_cast<std::size_t>(idx / cols)];
    cell.order_quantity = quantity_grid[static_cast<std::size_t>(idx % cols)];
    try {
      const Policy policy(initial_stock, cell.reorder_offset, cell.order_quantity);
      cell.cost = expected_total_cost(model, policy, rates, t, series, quadrature);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  });
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const SweepCell& cell = result.cells[i];
    if (!cell.ok) continue;
    if (!result.argmin || cell.cost.total < result.cells[*result.argmin].cost.total) {
      result.argmin = i;
    }
  }
  return result;
}

}  // namespace levy
