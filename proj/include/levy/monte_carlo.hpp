#pragma once

#include <cstdint>
#include <vector>

#include "levy/demand_model.hpp"
#include "levy/rng.hpp"

namespace levy {

struct PathEvent {
  enum class Source { unit_jump, compound_jump };
  double time = 0.0;
  double jump_size = 0.0;
  Source source = Source::unit_jump;
};

struct McConfig {
  std::int64_t paths = 100000;
  double horizon = 10.0;
  std::uint64_t seed = 42;
  double confidence_level = 0.95;
  bool operator==(const McConfig&) const = default;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t paths_used = 0;
};

// Event-driven exact simulation: jump times come from superposed exponential
// clocks, never from time discretization. Events are returned in time order
// up to the horizon.
std::vector<PathEvent> simulate_path(const DemandModel& model, double horizon,
                                     Rng& rng);

// Exact draw of T_n = inf{s : D_s >= threshold(n)} for one path.
double sample_fpt(const DemandModel& model, const Policy& policy, std::int64_t n,
                  Rng& rng);

struct FptMomentEstimates {
  McEstimate mean;
  McEstimate variance;
};
FptMomentEstimates estimate_fpt_moments(const DemandModel& model, const Policy& policy,
                                        std::int64_t n, const McConfig& config);

struct McCostBreakdown {
  McEstimate ordering;
  McEstimate holding;
  McEstimate stockout;
  McEstimate total;
  double horizon = 0.0;
};
// Pathwise cost over [0, t]: ordering from the reorder count, holding and
// stockout from exact piecewise-linear integrals of the inventory path.
McCostBreakdown estimate_cost(const DemandModel& model, const Policy& policy,
                              const CostRates& rates, double t, const McConfig& config);

// P(D_s >= b) estimated as a binomial frequency with a Wald interval.
McEstimate estimate_tail(const DemandModel& model, double s, double b,
                         const McConfig& config);

}  // namespace levy
