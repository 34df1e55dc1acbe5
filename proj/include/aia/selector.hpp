#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "aia/core.hpp"

namespace aia {

/// Featurised selector state (partial input plus intermediate prediction).
struct StateFeatures {
  std::vector<double> scores;  ///< -log probs, one per class
  double margin = 0.0;         ///< best minus second-best probability
  double kl_to_prior = 0.0;    ///< KL(probs || prior)
  std::vector<double> argmax_onehot;
  std::size_t steps = 0;
  double steps_fraction = 0.0;
  bool quadratic = false;
  /// Regressor input: the base features in the order above, followed by all
  /// products base[i] * base[j] for i <= j when quadratic.
  std::vector<double> values;
};

/// 2K + 4 base features; d + d(d+1)/2 with the quadratic expansion.
std::size_t state_dimension(std::size_t num_classes, bool quadratic);

StateFeatures featurize_state(const Prediction& pred, std::span<const double> prior,
                              const PartialView& view, bool quadratic);

/// One cost-sensitive training unit: costs[i] belongs to allowed[i].
struct CostExample {
  StateFeatures state;
  std::vector<Action> allowed;
  std::vector<double> costs;
};

/// Cost-sensitive multiclass learner: one linear regressor per action
/// (parts 0..n-1, then Stop), trained on squared loss towards the action's
/// cost; acting takes the argmin of the predicted costs.
///
/// Updates are per-coordinate adaptive (AdaGrad) steps, shrunk when needed
/// so a single step never moves a prediction past its target.
class Policy {
 public:
  static constexpr double kDefaultLearnRate = 0.05;

  Policy(std::size_t num_parts, std::size_t state_dim, double learn_rate = kDefaultLearnRate);

  std::size_t num_parts() const { return num_parts_; }
  std::size_t num_actions() const { return num_parts_ + 1; }
  std::size_t state_dim() const { return state_dim_; }
  double learn_rate() const { return learn_rate_; }
  void set_learn_rate(double rate);
  std::uint64_t update_count() const { return update_count_; }

  /// Weights of one action's regressor; the last entry is the bias.
  std::span<const double> regressor(Action a) const;
  std::span<double> regressor(Action a);
  std::span<const double> weights() const { return weights_; }

  double predicted_cost(Action a, std::span<const double> state) const;
  /// Argmin of predicted cost over `allowed`; ties go to Stop, then to the
  /// lowest part index. Throws std::invalid_argument if `allowed` is empty.
  Action act(const StateFeatures& sf, std::span<const Action> allowed) const;

  /// d/dw of 0.5 * (predicted_cost(a, state) - target)^2, bias last.
  std::vector<double> gradient(Action a, std::span<const double> state, double target) const;
  /// One step per allowed action; other regressors are untouched.
  void update(const CostExample& ex);

  void save(std::ostream& out) const;
  static Policy load(std::istream& in);

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  friend Policy average_policies(std::span<const Policy> policies);
  friend class PolicyAverage;

  std::size_t slot(Action a) const;
  void check_state(std::span<const double> state) const;

  std::size_t num_parts_;
  std::size_t state_dim_;
  double learn_rate_;
  std::uint64_t update_count_ = 0;
  std::vector<double> weights_;
  std::vector<double> grad_sq_;
};

/// Element-wise mean of weights and adaptive accumulators; update count is
/// the maximum. Throws std::invalid_argument on an empty list or mismatched
/// shapes.
Policy average_policies(std::span<const Policy> policies);

/// Running mean of policy snapshots without storing them.
class PolicyAverage {
 public:
  void add(const Policy& snapshot);
  std::size_t count() const { return count_; }
  /// Requires count() > 0.
  const Policy& mean() const;

 private:
  std::size_t count_ = 0;
  std::optional<Policy> mean_;
};

}  // namespace aia
