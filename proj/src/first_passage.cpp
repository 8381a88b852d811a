#include "levy/first_passage.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "levy/errors.hpp"
#include "levy/special_functions.hpp"

namespace levy {

namespace detail {

double psi_derivative(const DemandModel& model, double theta) {
  double v = model.drift();
  if (model.unit_jump_rate() > 0.0) {
    v += model.unit_jump_size() * model.unit_jump_rate() *
         std::exp(theta * model.unit_jump_size());
  }
  if (model.has_compound_component()) {
    const auto& jd = *model.jump();
    v += model.compound_rate() * (jd.shape / jd.rate) *
         std::exp((jd.shape + 1.0) * std::log1p(theta / (jd.rate - theta)));
  }
  return v;
}

double phi_inverse_newton(const DemandModel& model, double s) {
  if (s == 0.0) return 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  double lo = 0.0;  // psi(lo) < s
  double hi;
  if (model.has_compound_component()) {
    // approach the pole at eta from below until psi exceeds s
    const double eta = model.jump()->rate;
    int k = 1;
    hi = eta - std::ldexp(eta, -k);
    while (laplace_exponent(model, hi) <= s) {
      ++k;
      const double next = eta - std::ldexp(eta, -k);
      if (!(next > hi) || k > 1000) {
        throw NonConvergenceError("phi_inverse: cannot bracket root below the jump rate");
      }
      hi = next;
    }
  } else {
    hi = 1.0;
    while (laplace_exponent(model, hi) <= s) {
      hi *= 2.0;
      if (hi > 1e308) throw NonConvergenceError("phi_inverse: cannot bracket root");
    }
  }
  double theta = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    const double f = laplace_exponent(model, theta) - s;
    if (std::abs(f) <= 1e-13 * std::fmax(1.0, s)) return theta;
    if (f > 0.0) hi = theta; else lo = theta;
    if (hi - lo <= 4.0 * eps * hi) return 0.5 * (lo + hi);
    double next = theta - f / psi_derivative(model, theta);
    if (!std::isfinite(next) || !(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    theta = next;
  }
  throw NonConvergenceError("phi_inverse: iteration cap reached");
}

}  // namespace detail

double phi_inverse(const DemandModel& model, double s) {
  if (!(s >= 0.0)) throw std::domain_error("phi_inverse: s must be >= 0");
  if (s == 0.0) return 0.0;

  const double mu = model.drift();
  const bool unit = model.has_unit_component();
  const bool compound = model.has_compound_component();

  if (!unit && !compound) {
    return s / mu;  // pure drift (mu > 0 by nondegeneracy)
  }
  if (unit && !compound && mu > 0.0) {
    // drift + unit jumps: psi(theta) = theta*mu + lambda*(exp(theta*alpha) - 1)
    const double alpha = model.unit_jump_size();
    const double lambda = model.unit_jump_rate();
    const double log_a = std::log(alpha * lambda / mu);
    const double y = log_a + (alpha / mu) * (s + lambda);
    const double w = lambert_w0_of_exp(y);
    // theta = (s + lambda)/mu - w/alpha algebraically, but that difference
    // cancels catastrophically at large s; log(w) - log_a is the same value
    // with relative-error conditioning
    return (std::log(w) - log_a) / alpha;
  }
  if (!unit && compound && mu > 0.0 && model.jump()->shape == 1.0) {
    // drift + exponential jumps: theta*mu + lambda'*theta/(eta - theta) = s
    // gives mu*theta^2 - (mu*eta + s + lambda')*theta + s*eta = 0; the smaller
    // root is the one below eta. Written to avoid cancellation at small s.
    const double eta = model.jump()->rate;
    const double lambda_p = model.compound_rate();
    const double c = mu * eta + s + lambda_p;
    const double disc = c * c - 4.0 * mu * s * eta;
    return 2.0 * s * eta / (c + std::sqrt(disc));
  }
  return detail::phi_inverse_newton(model, s);
}

double fpt_laplace(const DemandModel& model, const Policy& policy, std::int64_t n,
                   double s) {
  if (n < 1) throw std::invalid_argument("fpt_laplace: n must be >= 1");
  if (!(s >= 0.0)) throw std::domain_error("fpt_laplace: s must be >= 0");
  return std::exp(-policy.threshold(n) * phi_inverse(model, s));
}

FptMoments fpt_moments(const DemandModel& model, const Policy& policy, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("fpt_moments: n must be >= 1");
  const double level = policy.threshold(n);
  const PsiDerivatives d = psi_derivatives_at_zero(model);
  const double mean = level / d.first;
  const double variance = level * d.second / (d.first * d.first * d.first);
  return {n, mean, variance};
}

}  // namespace levy
