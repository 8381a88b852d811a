#pragma once

#include <cstdint>

#include "levy/demand_model.hpp"
#include "levy/errors.hpp"

namespace levy {

// Truncation controls for the Poisson mixture series. Each Poisson window is
// grown outward from its mode until it holds at least 1 - tail_mass_tol/2 of
// the mass; hitting an index cap first raises SeriesCapError.
struct SeriesControl {
  double tail_mass_tol = 1e-10;          // in (0, 1e-3]
  std::int64_t max_unit_index = 10000;
  std::int64_t max_compound_index = 10000;
  std::int64_t max_replenishments = 100000;
  bool operator==(const SeriesControl&) const = default;
};

// P(J_1 + ... + J_j >= x) for iid Gamma(shape, rate) jumps: the regularized
// upper gamma Q(j*shape, rate*x). j = 0 yields the indicator of x <= 0.
double jump_sum_survival(const JumpDistribution& dist, std::int64_t j, double x);

// P(D_s >= b), b > 0, via the truncated double Poisson series.
double demand_tail(const DemandModel& model, double s, double b,
                   const SeriesControl& control = {});

// P(T_n < t), identified with P(D_t >= threshold(n)).
double reorder_prob(const DemandModel& model, const Policy& policy, std::int64_t n,
                    double t, const SeriesControl& control = {});

// E[R_t] = sum_{n>=1} P(T_n < t); the sum is cut once a term drops below
// tail_mass_tol, which the sandwich bound keeps within tolerance of the limit.
double expected_orders(const DemandModel& model, const Policy& policy, double t,
                       const SeriesControl& control = {});

}  // namespace levy
