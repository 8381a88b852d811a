#pragma once

#include <cstdint>

#include "levy/demand_model.hpp"

namespace levy {

// Inverse of the Laplace exponent: the unique theta >= 0 with psi(theta) = s.
// Dispatches to closed forms (Lambert W for drift + unit jumps, quadratic
// root for drift + exponential jumps) and to a safeguarded Newton iteration
// otherwise.
double phi_inverse(const DemandModel& model, double s);

// Laplace transform of the n-th passage time:
// E[exp(-s*T_n)] = exp(-threshold(n) * phi_inverse(s)).
double fpt_laplace(const DemandModel& model, const Policy& policy, std::int64_t n,
                   double s);

struct FptMoments {
  std::int64_t n = 1;
  double mean = 0.0;
  double variance = 0.0;
};

// mean = threshold(n)/psi'(0), variance = threshold(n)*psi''(0)/psi'(0)^3.
FptMoments fpt_moments(const DemandModel& model, const Policy& policy, std::int64_t n);

namespace detail {

// psi'(theta); theta must lie inside the domain of psi.
double psi_derivative(const DemandModel& model, double theta);

// Generic bracketed Newton inversion. The closed-form branches used by
// phi_inverse must agree with this root; exposed so tests can compare.
double phi_inverse_newton(const DemandModel& model, double s);

}  // namespace detail

}  // namespace levy
