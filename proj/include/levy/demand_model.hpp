#pragma once

#include <cstdint>
#include <optional>

namespace levy {

// Jump-size law for the compound component. Exponential(rate) is normalized
// to shape 1 at construction so both kinds share every downstream code path.
struct JumpDistribution {
  enum class Kind { exponential, gamma };
  Kind kind = Kind::exponential;
  double shape = 1.0;  // beta
  double rate = 1.0;   // eta

  static JumpDistribution exponential(double rate);
  static JumpDistribution gamma(double shape, double rate);

  double mean() const { return shape / rate; }
  bool operator==(const JumpDistribution&) const = default;
};

// Cumulative demand is the subordinator
//   D_t = drift*t + unit_jump_size*N_t + sum_{k<=N'_t} J_k,
// where N and N' are independent Poisson processes with rates unit_jump_rate
// and compound_rate, and the J_k are iid draws from `jump`. All pieces are
// nonnegative, so D is nondecreasing.
class DemandModel {
 public:
  DemandModel(double drift, double unit_jump_size, double unit_jump_rate,
              double compound_rate,
              std::optional<JumpDistribution> jump = std::nullopt);

  double drift() const { return drift_; }
  double unit_jump_size() const { return unit_jump_size_; }
  double unit_jump_rate() const { return unit_jump_rate_; }
  double compound_rate() const { return compound_rate_; }
  const std::optional<JumpDistribution>& jump() const { return jump_; }

  // Zero-size unit jumps marginalize out of every formula, so the unit
  // component only counts when both its rate and size are positive.
  bool has_unit_component() const {
    return unit_jump_rate_ > 0.0 && unit_jump_size_ > 0.0;
  }
  bool has_compound_component() const { return compound_rate_ > 0.0; }

  bool operator==(const DemandModel&) const = default;

 private:
  double drift_;
  double unit_jump_size_;
  double unit_jump_rate_;
  double compound_rate_;
  std::optional<JumpDistribution> jump_;
};

// Fixed-order-quantity policy: the n-th order of Q units is triggered when
// cumulative demand reaches threshold(n) = reorder_offset + (n-1)*order_quantity,
// i.e. when inventory drops to initial_stock - reorder_offset the first time.
struct Policy {
  double initial_stock;   // x
  double reorder_offset;  // a
  double order_quantity;  // Q

  Policy(double initial_stock, double reorder_offset, double order_quantity);

  double threshold(std::int64_t n) const {
    return reorder_offset + static_cast<double>(n - 1) * order_quantity;
  }
  bool operator==(const Policy&) const = default;
};

struct CostRates {
  double ordering = 0.0;  // per unit ordered
  double holding = 0.0;   // per unit held per unit time
  double stockout = 0.0;  // per unit short per unit time

  CostRates() = default;
  CostRates(double ordering, double holding, double stockout);
  bool operator==(const CostRates&) const = default;
};

// Laplace exponent psi(theta) = log E[exp(theta*D_1)], defined for
// theta < jump rate when a compound component is present.
double laplace_exponent(const DemandModel& model, double theta);

struct PsiDerivatives {
  double first;   // psi'(0)  = mean demand rate
  double second;  // psi''(0) = variance rate
};
PsiDerivatives psi_derivatives_at_zero(const DemandModel& model);

// Long-run demand rate m with E[D_t] = m*t.
double mean_rate(const DemandModel& model);

}  // namespace levy
