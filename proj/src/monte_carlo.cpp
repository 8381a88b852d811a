#include "levy/monte_carlo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "levy/parallel.hpp"

namespace levy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_config(const McConfig& c) {
  if (c.paths < 100) throw std::invalid_argument("mc paths must be >= 100");
  if (!(c.horizon > 0.0)) throw std::invalid_argument("mc horizon must be > 0");
  if (!(c.confidence_level > 0.0) || !(c.confidence_level < 1.0)) {
    throw std::invalid_argument("mc confidence_level must lie in (0, 1)");
  }
}

// Acklam's rational approximation to the standard normal quantile,
// |relative error| < 1.2e-9 — far below Monte Carlo noise.
double normal_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("normal_quantile: p in (0,1)");
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

McEstimate finish_estimate(double mean, double std_error, double confidence,
                           std::int64_t paths) {
  const double z = normal_quantile(0.5 * (1.0 + confidence));
  return {mean, std_error, mean - z * std_error, mean + z * std_error, paths};
}

// Merged next-event view of the two Poisson clocks. Each consumed event draws
// the replacement inter-arrival (and, for compound events, the jump size) in
// a fixed order, so a path is a pure function of its Rng stream.
class EventStream {
 public:
  EventStream(const DemandModel& model, Rng& rng) : model_(model), rng_(rng) {
    if (model.unit_jump_rate() > 0.0) {
      next_unit_ = rng_.exponential(model.unit_jump_rate());
    }
    if (model.has_compound_component()) {
      next_compound_ = rng_.exponential(model.compound_rate());
    }
  }

  double peek_time() const { return std::min(next_unit_, next_compound_); }

  PathEvent next() {
    if (next_unit_ <= next_compound_) {
      const double t = next_unit_;
      next_unit_ += rng_.exponential(model_.unit_jump_rate());
      return {t, model_.unit_jump_size(), PathEvent::Source::unit_jump};
    }
    const double t = next_compound_;
    next_compound_ += rng_.exponential(model_.compound_rate());
    const double size = rng_.sample_jump(*model_.jump());
    return {t, size, PathEvent::Source::compound_jump};
  }

 private:
  const DemandModel& model_;
  Rng& rng_;
  double next_unit_ = kInf;
  double next_compound_ = kInf;
};

// Drift can land exactly on a threshold when mu, the unit jump size, and the
// policy levels are commensurate, so the crossing events sit on the boundary
// with positive probability. Level comparisons leave room for the rounding
// error accumulated along a path; the slack is far below any resolvable
// Monte Carlo scale for continuously distributed crossings.
inline bool reaches(double value, double level) {
  return value >= level - 1e-9 * std::max(1.0, std::abs(level));
}

// Trapezoid of X(s) = x0 - mu*s over [0, dt] into `hold`, and of max(-X, 0)
// into `shortfall`, splitting at the sign change when the segment crosses 0.
void accumulate_segment(double x0, double dt, double mu, double& hold,
                        double& shortfall) {
  if (!(dt > 0.0)) return;
  const double x1 = x0 - mu * dt;
  hold += 0.5 * (x0 + x1) * dt;
  if (x0 <= 0.0 && x1 <= 0.0) {
    shortfall += -0.5 * (x0 + x1) * dt;
  } else if (x1 < 0.0) {  // x0 > 0 > x1, crossing at x0/mu
    const double below = dt - x0 / mu;
    shortfall += 0.5 * (-x1) * below;
  }
}

struct PathCost {
  double ordering = 0.0;
  double holding = 0.0;
  double stockout = 0.0;
  double total = 0.0;
};

PathCost simulate_cost_path(const DemandModel& model, const Policy& policy,
                            const CostRates& rates, double t, Rng& rng) {
  const double mu = model.drift();
  double clock = 0.0;
  double demand = 0.0;
  std::int64_t orders = 0;
  double next_level = policy.reorder_offset;
  double hold = 0.0, shortfall = 0.0;
  EventStream events(model, rng);
  const auto inventory = [&] {
    return policy.initial_stock - demand +
           static_cast<double>(orders) * policy.order_quantity;
  };
  for (;;) {
    const double seg_end = std::min(events.peek_time(), t);
    // drift-driven reorders inside [clock, seg_end]
    while (mu > 0.0 && reaches(demand + mu * (seg_end - clock), next_level)) {
      const double dt = std::max(0.0, (next_level - demand) / mu);
      accumulate_segment(inventory(), dt, mu, hold, shortfall);
      clock += dt;
      demand = next_level;
      ++orders;
      next_level += policy.order_quantity;
    }
    accumulate_segment(inventory(), seg_end - clock, mu, hold, shortfall);
    demand += mu * (seg_end - clock);
    clock = seg_end;
    if (clock >= t) break;
    demand += events.next().jump_size;
    while (reaches(demand, next_level)) {
      ++orders;
      next_level += policy.order_quantity;
    }
  }
  PathCost out;
  out.ordering = rates.ordering * policy.order_quantity * static_cast<double>(orders);
  out.holding = rates.holding * hold;
  out.stockout = rates.stockout * shortfall;
  out.total = out.ordering + out.holding + out.stockout;
  return out;
}

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double fourth_central = 0.0;
};

SampleStats compute_stats(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : xs) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  SampleStats st;
  st.mean = mean;
  st.variance = xs.size() > 1 ? m2 / (n - 1.0) : 0.0;
  st.fourth_central = m4 / n;
  return st;
}

McEstimate estimate_from_samples(const std::vector<double>& xs, double confidence) {
  const SampleStats st = compute_stats(xs);
  const double n = static_cast<double>(xs.size());
  return finish_estimate(st.mean, std::sqrt(st.variance / n), confidence,
                         static_cast<std::int64_t>(xs.size()));
}

}  // namespace

std::vector<PathEvent> simulate_path(const DemandModel& model, double horizon,
                                     Rng& rng) {
  if (!(horizon >= 0.0)) throw std::domain_error("simulate_path: horizon must be >= 0");
  std::vector<PathEvent> events;
  EventStream stream(model, rng);
  while (stream.peek_time() <= horizon) events.push_back(stream.next());
  return events;
}

double sample_fpt(const DemandModel& model, const Policy& policy, std::int64_t n,
                  Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_fpt: n must be >= 1");
  const double level = policy.threshold(n);
  const double mu = model.drift();
  if (!(model.unit_jump_rate() > 0.0) && !model.has_compound_component()) {
    return level / mu;
  }
  EventStream events(model, rng);
  double clock = 0.0;
  double demand = 0.0;
  for (;;) {
    const double te = events.peek_time();
    if (mu > 0.0 && reaches(demand + mu * (te - clock), level)) {
      return clock + std::max(0.0, (level - demand) / mu);
    }
    demand += mu * (te - clock);
    clock = te;
    demand += events.next().jump_size;
    if (reaches(demand, level)) return clock;
  }
}

FptMomentEstimates estimate_fpt_moments(const DemandModel& model, const Policy& policy,
                                        std::int64_t n, const McConfig& config) {
  validate_config(config);
  if (n < 1) throw std::invalid_argument("estimate_fpt_moments: n must be >= 1");
  std::vector<double> samples(static_cast<std::size_t>(config.paths));
  parallel_for(config.paths, [&](std::int64_t i) {
    Rng rng = Rng::for_path(config.seed, static_cast<std::uint64_t>(i));
    samples[static_cast<std::size_t>(i)] = sample_fpt(model, policy, n, rng);
  });
  const SampleStats st = compute_stats(samples);
  const double paths = static_cast<double>(config.paths);
  FptMomentEstimates out;
  out.mean = finish_estimate(st.mean, std::sqrt(st.variance / paths),
                             config.confidence_level, config.paths);
  // Var(sample variance) ~ (m4 - sigma^4 (n-3)/(n-1)) / n
  double var_of_var =
      (st.fourth_central -
       st.variance * st.variance * (paths - 3.0) / (paths - 1.0)) /
      paths;
  if (var_of_var < 0.0) var_of_var = 0.0;
  out.variance = finish_estimate(st.variance, std::sqrt(var_of_var),
                                 config.confidence_level, config.paths);
  return out;
}

McCostBreakdown estimate_cost(const DemandModel& model, const Policy& policy,
                              const CostRates& rates, double t, const McConfig& config) {
  validate_config(config);
  if (!(t > 0.0)) throw std::domain_error("estimate_cost: t must be > 0");
  const auto count = static_cast<std::size_t>(config.paths);
  std::vector<double> ordering(count), holding(count), stockout(count), total(count);
  parallel_for(config.paths, [&](std::int64_t i) {
    Rng rng = Rng::for_path(config.seed, static_cast<std::uint64_t>(i));
    const PathCost pc = simulate_cost_path(model, policy, rates, t, rng);
    const auto k = static_cast<std::size_t>(i);
    ordering[k] = pc.ordering;
    holding[k] = pc.holding;
    stockout[k] = pc.stockout;
    total[k] = pc.total;
  });
  McCostBreakdown out;
  out.ordering = estimate_from_samples(ordering, config.confidence_level);
  out.holding = estimate_from_samples(holding, config.confidence_level);
  out.stockout = estimate_from_samples(stockout, config.confidence_level);
  out.total = estimate_from_samples(total, config.confidence_level);
  out.horizon = t;
  return out;
}

McEstimate estimate_tail(const DemandModel& model, double s, double b,
                         const McConfig& config) {
  validate_config(config);
  if (!(s >= 0.0)) throw std::domain_error("estimate_tail: s must be >= 0");
  if (!(b > 0.0)) throw std::domain_error("estimate_tail: b must be > 0");
  std::vector<double> hit(static_cast<std::size_t>(config.paths));
  parallel_for(config.paths, [&](std::int64_t i) {
    Rng rng = Rng::for_path(config.seed, static_cast<std::uint64_t>(i));
    double demand = model.drift() * s;
    if (model.unit_jump_rate() > 0.0) {
      for (double clock = rng.exponential(model.unit_jump_rate()); clock <= s;
           clock += rng.exponential(model.unit_jump_rate())) {
        demand += model.unit_jump_size();
      }
    }
    if (model.has_compound_component()) {
      for (double clock = rng.exponential(model.compound_rate()); clock <= s;
           clock += rng.exponential(model.compound_rate())) {
        demand += rng.sample_jump(*model.jump());
      }
    }
    hit[static_cast<std::size_t>(i)] = reaches(demand, b) ? 1.0 : 0.0;
  });
  double p = 0.0;
  for (double v : hit) p += v;
  p /= static_cast<double>(config.paths);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(config.paths));
  return finish_estimate(p, se, config.confidence_level, config.paths);
}

}  // namespace levy
