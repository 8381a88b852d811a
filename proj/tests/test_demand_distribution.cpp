#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "levy/demand_distribution.hpp"
#include "levy/demand_model.hpp"
#include "levy/monte_carlo.hpp"
#include "levy/special_functions.hpp"

using namespace levy;

namespace {

// Brute-force P(D_s >= b): wide flat double sum, no windowing, no caching,
// pmf straight from the log form. Only the scalar survival function is
// shared, and that one is pinned against a big-float oracle elsewhere.
double brute_tail(const DemandModel& m, double s, double b) {
  const double drift_part = m.drift() * s;
  if (drift_part >= b) return 1.0;
  auto pmf = [](std::int64_t k, double mean) {
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k) * std::log(mean) - mean -
                    std::lgamma(static_cast<double>(k) + 1.0));
  };
  auto inner = [&](double x) {
    if (x <= 0.0) return 1.0;
    if (!m.has_compound_component()) return 0.0;
    double acc = 0.0;
    for (std::int64_t j = 1; j <= 400; ++j) {
      acc += pmf(j, m.compound_rate() * s) *
             upper_gamma_regularized(static_cast<double>(j) * m.jump()->shape,
                                     m.jump()->rate * x);
    }
    return acc;
  };
  if (!m.has_unit_component()) return inner(b - drift_part);
  double acc = 0.0;
  for (std::int64_t i = 0; i <= 400; ++i) {
    acc += pmf(i, m.unit_jump_rate() * s) *
           inner(b - drift_part - m.unit_jump_size() * static_cast<double>(i));
  }
  return std::min(acc, 1.0);
}

DemandModel smoke_model() { return {1.0, 1.0, 1.0, 0.0}; }

}  // namespace

TEST_CASE("jump sum survival closed values") {
  const auto exp1 = JumpDistribution::exponential(1.0);
  CHECK(jump_sum_survival(exp1, 0, -1.0) == 1.0);
  CHECK(jump_sum_survival(exp1, 0, 0.0) == 1.0);
  CHECK(jump_sum_survival(exp1, 0, 2.0) == 0.0);
  CHECK(jump_sum_survival(exp1, 3, 0.0) == 1.0);
  // Erlang(4,1) survival at 1: e^-1 (1 + 1 + 1/2 + 1/6)
  CHECK(jump_sum_survival(exp1, 4, 1.0) ==
        doctest::Approx(std::exp(-1.0) * 8.0 / 3.0).epsilon(1e-13));
  // three Gamma(2,2) jumps = Erlang(6,2): survival at 1 is e^-2 * 109/15
  CHECK(jump_sum_survival(JumpDistribution::gamma(2.0, 2.0), 3, 1.0) ==
        doctest::Approx(std::exp(-2.0) * 109.0 / 15.0).epsilon(1e-13));
  CHECK_THROWS_AS(jump_sum_survival(exp1, -1, 1.0), std::invalid_argument);
}

TEST_CASE("jump sum survival is monotone in count and level") {
  const auto g = JumpDistribution::gamma(1.6, 2.3);
  for (std::int64_t j = 1; j < 12; ++j) {
    CHECK(jump_sum_survival(g, j + 1, 3.0) > jump_sum_survival(g, j, 3.0));
  }
  double prev = 1.0;
  for (double x = 0.25; x < 12.0; x += 0.25) {
    const double cur = jump_sum_survival(g, 4, x);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("demand tail validation and degenerate limits") {
  const auto m = smoke_model();
  CHECK_THROWS_AS(demand_tail(m, -0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(demand_tail(m, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(demand_tail(m, 1.0, -2.0), std::domain_error);
  CHECK(demand_tail(m, 0.0, 1.0) == 0.0);
  // drift alone reaches b deterministically
  CHECK(demand_tail(m, 5.0, 5.0) == 1.0);
  const DemandModel pure_drift(2.0, 0.0, 0.0, 0.0);
  CHECK(demand_tail(pure_drift, 1.0, 2.0) == 1.0);
  CHECK(demand_tail(pure_drift, 1.0, 2.0 + 1e-9) == 0.0);
  SeriesControl bad;
  bad.tail_mass_tol = 0.0;
  CHECK_THROWS_AS(demand_tail(m, 1.0, 1.0, bad), std::invalid_argument);
  bad.tail_mass_tol = 0.1;
  CHECK_THROWS_AS(demand_tail(m, 1.0, 1.0, bad), std::invalid_argument);
}

TEST_CASE("demand tail frozen values") {
  // the first two values are exact Poisson tails; the default window
  // truncation (~1e-10 of mass) is too coarse for a 1e-12 comparison
  SeriesControl tight;
  tight.tail_mass_tol = 1e-14;
  // unit jumps only: P(N_1 >= 3) = 1 - e^-1 (1 + 1 + 1/2)
  const DemandModel unit(0.0, 1.0, 1.0, 0.0);
  CHECK(demand_tail(unit, 1.0, 2.5, tight) ==
        doctest::Approx(0.08030139707139419601).epsilon(1e-12));
  // drift + unit: P(1 + N_1 >= 2.5) = P(N_1 >= 2) = 1 - 2 e^-1
  CHECK(demand_tail(smoke_model(), 1.0, 2.5, tight) ==
        doctest::Approx(0.26424111765711535681).epsilon(1e-12));
  // exponential compound only: sum_j pois(j;1) Q(j, 1)
  const DemandModel comp(0.0, 0.0, 0.0, 1.0, JumpDistribution::exponential(1.0));
  CHECK(demand_tail(comp, 1.0, 1.0) ==
        doctest::Approx(0.34574583872316448023).epsilon(1e-9));
  // all three components with a fractional-shape gamma law
  const DemandModel full(0.5, 1.0, 2.0, 1.5, JumpDistribution::gamma(2.5, 2.0));
  CHECK(demand_tail(full, 1.2, 3.0) ==
        doctest::Approx(0.80656687541960135911).epsilon(1e-9));
}

TEST_CASE("demand tail agrees with the brute-force double sum") {
  const std::vector<DemandModel> models = {
      smoke_model(),
      {0.0, 0.0, 0.0, 1.0, JumpDistribution::exponential(1.0)},
      {0.5, 1.0, 2.0, 1.5, JumpDistribution::gamma(2.5, 2.0)},
      {0.5, 1.0, 2.0, 1.5, JumpDistribution::gamma(2.0, 2.0)},  // integer-shape path
      {0.3, 0.0, 0.0, 2.0, JumpDistribution::gamma(3.0, 1.5)},
      {2.0, 0.5, 4.0, 0.8, JumpDistribution::exponential(0.6)},
  };
  for (const auto& m : models) {
    for (double s : {0.4, 1.0, 2.7}) {
      for (double b : {0.8, 2.0, 4.5, 9.0}) {
        const double got = demand_tail(m, s, b);
        const double want = brute_tail(m, s, b);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
        CHECK(std::abs(got - want) <= 1e-8);
      }
    }
  }
}

TEST_CASE("zero-size unit jumps marginalize out exactly") {
  const DemandModel with_idle(0.3, 0.0, 5.0, 2.0, JumpDistribution::gamma(3.0, 1.5));
  const DemandModel without(0.3, 0.0, 0.0, 2.0, JumpDistribution::gamma(3.0, 1.5));
  for (double s : {0.5, 1.5}) {
    for (double b : {1.0, 3.0, 7.0}) {
      CHECK(demand_tail(with_idle, s, b) == demand_tail(without, s, b));
    }
  }
}

TEST_CASE("demand tail is monotone in time and level") {
  std::mt19937 gen(91);
  std::uniform_real_distribution<double> u(0.2, 2.5);
  for (int rep = 0; rep < 6; ++rep) {
    const DemandModel m(u(gen), u(gen), u(gen), u(gen),
                        JumpDistribution::gamma(u(gen), u(gen)));
    const double b = 1.0 + 3.0 * u(gen);
    double prev = 0.0;
    for (double s = 0.2; s <= 4.0; s += 0.2) {
      const double cur = demand_tail(m, s, b);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
    const double s = 1.3;
    prev = 1.0;
    for (double level = 0.4; level <= 8.0; level += 0.4) {
      const double cur = demand_tail(m, s, level);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("demand tail agrees with simulation") {
  McConfig mc;
  mc.paths = 200000;
  mc.seed = 99;
  const std::vector<DemandModel> models = {
      smoke_model(),
      {0.5, 1.0, 2.0, 1.5, JumpDistribution::gamma(2.5, 2.0)},
      {0.0, 0.0, 0.0, 2.0, JumpDistribution::exponential(1.3)},
  };
  for (const auto& m : models) {
    for (const auto& [s, b] : std::vector<std::pair<double, double>>{
             {1.0, 1.7}, {2.0, 4.3}}) {
      const double series = demand_tail(m, s, b);
      const auto est = estimate_tail(m, s, b, mc);
      CHECK(std::abs(est.mean - series) <= 4.0 * std::max(est.std_error, 1e-6));
    }
  }
}

TEST_CASE("series caps raise instead of silently truncating") {
  SeriesControl tight;
  tight.max_unit_index = 2;
  const DemandModel heavy_unit(0.0, 1.0, 50.0, 0.0);
  CHECK_THROWS_AS(demand_tail(heavy_unit, 1.0, 200.0, tight), SeriesCapError);

  SeriesControl tight2;
  tight2.max_compound_index = 1;
  const DemandModel heavy_comp(0.0, 0.0, 0.0, 40.0, JumpDistribution::exponential(1.0));
  CHECK_THROWS_AS(demand_tail(heavy_comp, 1.0, 10.0, tight2), SeriesCapError);
}

TEST_CASE("reorder probability is the tail at the running threshold") {
  const auto m = smoke_model();
  const Policy policy(5.0, 2.0, 3.0);
  for (std::int64_t n : {1, 2, 3}) {
    for (double t : {0.5, 1.0, 4.0}) {
      CHECK(reorder_prob(m, policy, n, t) == demand_tail(m, t, policy.threshold(n)));
    }
  }
  CHECK(reorder_prob(m, policy, 1, 0.0) == 0.0);
  CHECK_THROWS_AS(reorder_prob(m, policy, 0, 1.0), std::invalid_argument);
}

TEST_CASE("expected orders: drift staircase is exact") {
  const DemandModel m(1.0, 0.0, 0.0, 0.0);
  const Policy policy(5.0, 1.0, 1.0);
  // thresholds 1,2,3,... crossed at t = 1,2,3,...
  CHECK(expected_orders(m, policy, 3.5) == 3.0);
  CHECK(expected_orders(m, policy, 0.5) == 0.0);
  CHECK(expected_orders(m, policy, 3.0) == 3.0);  // closed crossing at t = 3
}

TEST_CASE("expected orders matches an independent series evaluation") {
  // E[R_4] for the drift+unit model with thresholds 2,5,8,...:
  // sum_k pois(k;4) * (floor((k+2)/3) + 1), evaluated offline at high
  // precision.
  const auto m = smoke_model();
  const Policy policy(5.0, 2.0, 3.0);
  CHECK(expected_orders(m, policy, 4.0) ==
        doctest::Approx(2.6672991233134532189).epsilon(1e-9));

  double prev = 0.0;
  for (double t = 0.5; t <= 6.0; t += 0.5) {
    const double cur = expected_orders(m, policy, t);
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }

  // tightening the truncation tolerance barely moves the value
  SeriesControl loose;
  loose.tail_mass_tol = 1e-8;
  SeriesControl tight;
  tight.tail_mass_tol = 1e-13;
  CHECK(std::abs(expected_orders(m, policy, 4.0, loose) -
                 expected_orders(m, policy, 4.0, tight)) <= 1e-7);
}

TEST_CASE("expected orders respects the replenishment cap") {
  const DemandModel m(1.0, 0.0, 0.0, 0.0);
  const Policy policy(5.0, 1.0, 1.0);
  SeriesControl ctl;
  ctl.max_replenishments = 3;
  CHECK_THROWS_AS(expected_orders(m, policy, 100.0, ctl), SeriesCapError);
}

TEST_CASE("expected orders agrees with simulation") {
  McConfig mc;
  mc.paths = 300000;
  mc.seed = 424242;
  const auto m = smoke_model();
  const Policy policy(5.0, 2.0, 3.0);
  const double t = 4.0;
  const auto cost = estimate_cost(m, policy, CostRates(1.0, 0.0, 0.0), t, mc);
  // ordering rate 1 and quantity Q makes ordering cost Q * R_t
  const double mc_orders = cost.ordering.mean / policy.order_quantity;
  const double se = cost.ordering.std_error / policy.order_quantity;
  CHECK(std::abs(mc_orders - expected_orders(m, policy, t)) <= 3.5 * se);
}
