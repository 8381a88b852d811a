#pragma once

#include <cstdint>

namespace levy {

// Principal real branch of the Lambert W function: the w >= -1 solving
// w * exp(w) = z. Requires z >= -1/e; throws std::domain_error otherwise.
double lambert_w0(double z);

// W0(exp(y)), computed without forming exp(y). For y > 1 the root of
// w + log(w) = y is found directly, so y may exceed the overflow threshold.
double lambert_w0_of_exp(double y);

// Regularized upper incomplete gamma Q(shape, x) = Gamma(shape, x) / Gamma(shape).
// Requires shape > 0, x >= 0.
double upper_gamma_regularized(double shape, double x);

// exp(-mean) * mean^k / k!, evaluated in the log domain so large means and
// far-from-mode k do not underflow prematurely.
double poisson_pmf(std::int64_t k, double mean);

}  // namespace levy
