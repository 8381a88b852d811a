#include "levy/demand_model.hpp"

#include <cmath>
#include <stdexcept>

namespace levy {

namespace {

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
  }
}

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw std::invalid_argument(std::string(name) + " must be finite and > 0");
  }
}

}  // namespace

JumpDistribution JumpDistribution::exponential(double rate) {
  require_positive(rate, "jump rate");
  return {Kind::exponential, 1.0, rate};
}

JumpDistribution JumpDistribution::gamma(double shape, double rate) {
  require_positive(shape, "jump shape");
  require_positive(rate, "jump rate");
  return {Kind::gamma, shape, rate};
}

DemandModel::DemandModel(double drift, double unit_jump_size, double unit_jump_rate,
                         double compound_rate, std::optional<JumpDistribution> jump)
    : drift_(drift),
      unit_jump_size_(unit_jump_size),
      unit_jump_rate_(unit_jump_rate),
      compound_rate_(compound_rate),
      jump_(jump) {
  require_finite_nonneg(drift_, "drift");
  require_finite_nonneg(unit_jump_size_, "unit_jump_size");
  require_finite_nonneg(unit_jump_rate_, "unit_jump_rate");
  require_finite_nonneg(compound_rate_, "compound_rate");
  if (jump_.has_value() != (compound_rate_ > 0.0)) {
    throw std::invalid_argument(
        "jump distribution must be present exactly when compound_rate > 0");
  }
  if (jump_) {
    require_positive(jump_->shape, "jump shape");
    require_positive(jump_->rate, "jump rate");
  }
  if (!(drift_ + unit_jump_size_ * unit_jump_rate_ + compound_rate_ > 0.0)) {
    throw std::invalid_argument(
        "degenerate model: drift + unit_jump_size*unit_jump_rate + compound_rate "
        "must be > 0");
  }
}

Policy::Policy(double initial_stock, double reorder_offset, double order_quantity)
    : initial_stock(initial_stock),
      reorder_offset(reorder_offset),
      order_quantity(order_quantity) {
  require_positive(initial_stock, "initial_stock");
  require_positive(reorder_offset, "reorder_offset");
  require_positive(order_quantity, "order_quantity");
}

CostRates::CostRates(double ordering, double holding, double stockout)
    : ordering(ordering), holding(holding), stockout(stockout) {
  require_finite_nonneg(ordering, "ordering rate");
  require_finite_nonneg(holding, "holding rate");
  require_finite_nonneg(stockout, "stockout rate");
}

double laplace_exponent(const DemandModel& model, double theta) {
  if (!std::isfinite(theta)) throw std::domain_error("laplace_exponent: theta must be finite");
  if (model.has_compound_component() && !(theta < model.jump()->rate)) {
    throw std::domain_error("laplace_exponent: theta must be < jump rate");
  }
  double v = theta * model.drift();
  if (model.unit_jump_rate() > 0.0) {
    v += model.unit_jump_rate() * std::expm1(theta * model.unit_jump_size());
  }
  if (model.has_compound_component()) {
    const auto& jd = *model.jump();
    // (eta/(eta-theta))^beta - 1, written to stay accurate near theta = 0
    v += model.compound_rate() *
         std::expm1(jd.shape * std::log1p(theta / (jd.rate - theta)));
  }
  return v;
}

PsiDerivatives psi_derivatives_at_zero(const DemandModel& model) {
  const double alpha = model.unit_jump_size();
  const double lambda = model.unit_jump_rate();
  double first = model.drift() + alpha * lambda;
  double second = alpha * alpha * lambda;
  if (model.has_compound_component()) {
    const auto& jd = *model.jump();
    first += model.compound_rate() * jd.shape / jd.rate;
    second += model.compound_rate() * jd.shape * (jd.shape + 1.0) / (jd.rate * jd.rate);
  }
  return {first, second};
}

double mean_rate(const DemandModel& model) {
  double m = model.drift() + model.unit_jump_size() * model.unit_jump_rate();
  if (model.has_compound_component()) {
    m += model.compound_rate() * model.jump()->shape / model.jump()->rate;
  }
  return m;
}

}  // namespace levy
