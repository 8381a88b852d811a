#include "levy/demand_distribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "levy/special_functions.hpp"

namespace levy {

namespace {

void validate_control(const SeriesControl& c) {
  if (!(c.tail_mass_tol > 0.0) || !(c.tail_mass_tol <= 1e-3)) {
    throw std::invalid_argument("tail_mass_tol must lie in (0, 1e-3]");
  }
  if (c.max_unit_index < 1 || c.max_compound_index < 1 || c.max_replenishments < 1) {
    throw std::invalid_argument("series caps must be >= 1");
  }
}

// Contiguous Poisson(mean) pmf window grown outward from the mode until its
// mass reaches 1 - tail_tol. pmf[k - lo] is the weight of index k.
struct PmfWindow {
  std::int64_t lo = 0;
  std::vector<double> pmf{1.0};
  double mass = 1.0;
  std::int64_t hi() const { return lo + static_cast<std::int64_t>(pmf.size()) - 1; }
};

PmfWindow poisson_window(double mean, double tail_tol, std::int64_t index_cap,
                         const char* cap_name) {
  PmfWindow w;
  if (!(mean > 0.0)) return w;  // all mass at 0
  const std::int64_t mode = static_cast<std::int64_t>(mean);
  const double pm = poisson_pmf(mode, mean);
  std::int64_t lo = mode, hi = mode;
  double p_lo = pm, p_hi = pm, mass = pm;
  while (mass < 1.0 - tail_tol) {
    const double down = lo > 0 ? p_lo * static_cast<double>(lo) / mean : 0.0;
    const double up = p_hi * mean / static_cast<double>(hi + 1);
    if (down >= up) {
      if (down == 0.0) break;  // both frontiers underflowed
      --lo;
      p_lo = down;
      mass += down;
    } else {
      ++hi;
      if (hi > index_cap) {
        throw SeriesCapError(std::string("poisson window exceeded ") + cap_name +
                             " before reaching the tail-mass target");
      }
      p_hi = up;
      mass += up;
    }
  }
  w.lo = lo;
  w.pmf.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  w.pmf[static_cast<std::size_t>(mode - lo)] = pm;
  double v = pm;
  for (std::int64_t k = mode; k > lo; --k) {
    v *= static_cast<double>(k) / mean;
    w.pmf[static_cast<std::size_t>(k - 1 - lo)] = v;
  }
  v = pm;
  for (std::int64_t k = mode; k < hi; ++k) {
    v *= mean / static_cast<double>(k + 1);
    w.pmf[static_cast<std::size_t>(k + 1 - lo)] = v;
  }
  mass = 0.0;
  for (double p : w.pmf) mass += p;
  w.mass = mass;
  return w;
}

// Evaluates b -> P(D_s >= b) for one (model, s) pair. The unit-jump window is
// walked once per query; inner compound sums are memoized per offset x since
// lattice-aligned thresholds revisit the same offsets many times. Integer
// jump shapes additionally replace per-term incomplete-gamma evaluations with
// one Poisson CDF window per distinct offset.
class TailEvaluator {
 public:
  TailEvaluator(const DemandModel& model, double s, const SeriesControl& control)
      : model_(model), s_(s) {
    const double half_tol = 0.5 * control.tail_mass_tol;
    unit_active_ = model_.has_unit_component() && s > 0.0;
    comp_active_ = model_.has_compound_component() && s > 0.0;
    if (unit_active_) {
      unit_ = poisson_window(model_.unit_jump_rate() * s, half_tol,
                             control.max_unit_index, "max_unit_index");
    }
    if (comp_active_) {
      comp_ = poisson_window(model_.compound_rate() * s, half_tol,
                             control.max_compound_index, "max_compound_index");
      const double shape = model_.jump()->shape;
      const double rounded = std::round(shape);
      integer_shape_ =
          rounded >= 1.0 && rounded <= 1e15 && shape == rounded;
      shape_int_ = integer_shape_ ? static_cast<std::int64_t>(rounded) : 0;
    }
  }

  double operator()(double b) const {
    const double base = b - model_.drift() * s_;
    if (base <= 0.0) return 1.0;
    double acc;
    if (unit_active_) {
      const double alpha = model_.unit_jump_size();
      acc = 0.0;
      for (std::int64_t i = unit_.lo; i <= unit_.hi(); ++i) {
        const double x = base - alpha * static_cast<double>(i);
        acc += unit_.pmf[static_cast<std::size_t>(i - unit_.lo)] * inner(x);
      }
    } else {
      acc = inner(base);
    }
    return std::clamp(acc, 0.0, 1.0);
  }

 private:
  // P(sum of N'_s jumps >= x), summed over the compound window.
  double inner(double x) const {
    if (!comp_active_) return x <= 0.0 ? 1.0 : 0.0;
    if (x <= 0.0) return comp_.mass;
    const std::uint64_t key = std::bit_cast<std::uint64_t>(x);
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double v = integer_shape_ ? inner_integer_shape(x) : inner_generic(x);
    memo_.emplace(key, v);
    return v;
  }

  double inner_generic(double x) const {
    const auto& jd = *model_.jump();
    double out = 0.0;
    for (std::int64_t j = std::max<std::int64_t>(comp_.lo, 1); j <= comp_.hi(); ++j) {
      out += comp_.pmf[static_cast<std::size_t>(j - comp_.lo)] *
             upper_gamma_regularized(jd.shape * static_cast<double>(j), jd.rate * x);
    }
    return out;
  }

  // For integer shape B, P(Gamma(j*B, eta) >= x) = P(Poisson(eta*x) <= j*B-1),
  // so one pmf window plus prefix sums serves every j at this offset.
  double inner_integer_shape(double x) const {
    const double y = model_.jump()->rate * x;
    const PmfWindow w =
        poisson_window(y, 1e-15, std::int64_t{1} << 40, "internal cdf window");
    std::vector<double> prefix(w.pmf.size());
    double run = 0.0;
    for (std::size_t k = 0; k < w.pmf.size(); ++k) {
      run += w.pmf[k];
      prefix[k] = run;
    }
    double out = 0.0;
    for (std::int64_t j = std::max<std::int64_t>(comp_.lo, 1); j <= comp_.hi(); ++j) {
      const std::int64_t r = j * shape_int_ - 1;
      double cdf;
      if (r < w.lo) {
        cdf = 0.0;
      } else if (r >= w.hi()) {
        cdf = 1.0;
      } else {
        cdf = prefix[static_cast<std::size_t>(r - w.lo)];
      }
      out += comp_.pmf[static_cast<std::size_t>(j - comp_.lo)] * cdf;
    }
    return out;
  }

  DemandModel model_;
  double s_;
  bool unit_active_ = false;
  bool comp_active_ = false;
  bool integer_shape_ = false;
  std::int64_t shape_int_ = 0;
  PmfWindow unit_;
  PmfWindow comp_;
  mutable std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace

double jump_sum_survival(const JumpDistribution& dist, std::int64_t j, double x) {
  if (j < 0) throw std::invalid_argument("jump_sum_survival: j must be >= 0");
  if (!(dist.shape > 0.0) || !(dist.rate > 0.0)) {
    throw std::invalid_argument("jump_sum_survival: invalid jump distribution");
  }
  if (x <= 0.0) return 1.0;
  if (j == 0) return 0.0;
  return upper_gamma_regularized(dist.shape * static_cast<double>(j), dist.rate * x);
}

double demand_tail(const DemandModel& model, double s, double b,
                   const SeriesControl& control) {
  validate_control(control);
  if (!(s >= 0.0)) throw std::domain_error("demand_tail: s must be >= 0");
  if (!(b > 0.0)) throw std::domain_error("demand_tail: b must be > 0");
  if (model.drift() * s >= b) return 1.0;
  if (s == 0.0) return 0.0;
  const TailEvaluator tail(model, s, control);
  return tail(b);
}

double reorder_prob(const DemandModel& model, const Policy& policy, std::int64_t n,
                    double t, const SeriesControl& control) {
  if (n < 1) throw std::invalid_argument("reorder_prob: n must be >= 1");
  if (!(t >= 0.0)) throw std::domain_error("reorder_prob: t must be >= 0");
  return demand_tail(model, t, policy.threshold(n), control);
}

double expected_orders(const DemandModel& model, const Policy& policy, double t,
                       const SeriesControl& control) {
  validate_control(control);
  if (!(t >= 0.0)) throw std::domain_error("expected_orders: t must be >= 0");
  if (t == 0.0) return 0.0;
  const TailEvaluator tail(model, t, control);
  const double drift_reach = model.drift() * t;
  double acc = 0.0;
  for (std::int64_t n = 1; n <= control.max_replenishments; ++n) {
    const double level = policy.threshold(n);
    const double p = drift_reach >= level ? 1.0 : tail(level);
    acc += p;
    if (p < control.tail_mass_tol) return acc;
  }
  throw SeriesCapError(
      "expected_orders: max_replenishments reached before terms fell below "
      "tail_mass_tol");
}

}  // namespace levy
