#include "levy/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace levy {

namespace {

constexpr double kE = 2.718281828459045235;
constexpr double kInvE = 0.36787944117144232160;

// Halley refinement of w * exp(w) = z from a starting guess.
double halley_w(double w, double z) {
  for (int i = 0; i < 64; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double dw = f / denom;
    w -= dw;
    if (std::abs(dw) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace

double lambert_w0(double z) {
  if (!(z >= -kInvE)) throw std::domain_error("lambert_w0: z must be >= -1/e");
  if (z == 0.0) return 0.0;
  double w;
  if (z < -0.25) {
    // series around the branch point z = -1/e
    const double p = std::sqrt(std::fmax(0.0, 2.0 * (1.0 + kE * z)));
    if (p == 0.0) return -1.0;
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  } else if (z > kE) {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  } else {
    w = z / (1.0 + z);
  }
  w = halley_w(w, z);
  return w < -1.0 ? -1.0 : w;
}

double lambert_w0_of_exp(double y) {
  if (std::isnan(y)) throw std::domain_error("lambert_w0_of_exp: y must not be NaN");
  if (y <= 1.0) return lambert_w0(std::exp(y));
  // Solve w + log(w) = y for w > 1. g is increasing and concave, and the
  // starting point sits below the root, so Newton converges monotonically.
  double w = std::fmax(1.0, y - std::log(y));
  for (int i = 0; i < 64; ++i) {
    const double g = w + std::log(w) - y;
    const double dw = g / (1.0 + 1.0 / w);
    w -= dw;
    if (std::abs(dw) <= 1e-16 * w) break;
  }
  return w;
}

double upper_gamma_regularized(double shape, double x) {
  if (!(shape > 0.0)) throw std::domain_error("upper_gamma_regularized: shape must be > 0");
  if (!(x >= 0.0)) throw std::domain_error("upper_gamma_regularized: x must be >= 0");
  if (x == 0.0) return 1.0;
  const double log_prefix = shape * std::log(x) - x - std::lgamma(shape);
  if (x < shape + 1.0) {
    // lower series for P(shape, x); return the complement
    double term = 1.0 / shape;
    double sum = term;
    for (int k = 1; k < 100000; ++k) {
      term *= x / (shape + static_cast<double>(k));
      sum += term;
      if (term < sum * 1e-17) break;
    }
    const double p = std::exp(log_prefix + std::log(sum));
    const double q = 1.0 - p;
    return q < 0.0 ? 0.0 : (q > 1.0 ? 1.0 : q);
  }
  // modified Lentz continued fraction for Q(shape, x)
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - shape;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - shape);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= 1e-16) break;
  }
  const double q = std::exp(log_prefix) * h;
  return q < 0.0 ? 0.0 : (q > 1.0 ? 1.0 : q);
}

double poisson_pmf(std::int64_t k, double mean) {
  if (k < 0) throw std::domain_error("poisson_pmf: k must be >= 0");
  if (!(mean >= 0.0)) throw std::domain_error("poisson_pmf: mean must be >= 0");
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

}  // namespace levy
