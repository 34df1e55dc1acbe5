#pragma once

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aia/core.hpp"
#include "aia/engine.hpp"
#include "aia/reference.hpp"

namespace aia {

/// Largest part count brute-force enumeration accepts.
inline constexpr std::size_t kMaxEnumerationParts = 12;

struct OptimalSet {
  double loss = 0.0;
  /// The start view followed by the added parts in increasing order.
  PartialView view;
};

inline void check_enumeration_guard(std::size_t num_parts) {
  if (num_parts > kMaxEnumerationParts) {
    throw std::length_error("exhaustive search over " + std::to_string(num_parts) +
                            " parts exceeds the limit of " +
                            std::to_string(kMaxEnumerationParts));
  }
}

/// Minimum terminal combined loss over every superset of `start`, evaluated
/// with the model's from-scratch `evaluate`. The order of acquisition does
/// not enter the terminal loss, so subsets suffice. Ties go to the smaller
/// set, then to the lexicographically smaller sorted index list.
template <SetLossModel M>
OptimalSet brute_force_optimal(const M& model, const PartialView& start) {
  const std::size_t n = model.num_parts();
  check_enumeration_guard(n);
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i) {
    if (!start.contains(i)) free.push_back(i);
  }
  OptimalSet best{std::numeric_limits<double>::infinity(), start};
  std::vector<std::size_t> best_added;
  bool have_best = false;
  const std::size_t subsets = std::size_t{1} << free.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::vector<std::size_t> added;
    for (std::size_t b = 0; b < free.size(); ++b) {
      if (mask & (std::size_t{1} << b)) added.push_back(free[b]);
    }
    PartialView view = start;
    for (auto i : added) view.acquire(i);
    const double loss = model.evaluate(view).combined(model.lambda());
    const bool better = !have_best || loss < best.loss ||
                        (loss == best.loss && (added.size() < best_added.size() ||
                                               (added.size() == best_added.size() &&
                                                added < best_added)));
    if (better) {
      have_best = true;
      best = {loss, std::move(view)};
      best_added = std::move(added);
    }
  }
  return best;
}

template <SetLossModel M>
OptimalSet brute_force_optimal(const M& model) {
  return brute_force_optimal(model, PartialView(model.num_parts()));
}

/// reference / optimal with 0/0 = 1 and x/0 = +inf.
inline double suboptimality_ratio(double reference_loss, double optimal_loss) {
  if (optimal_loss == 0.0) {
    return reference_loss == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return reference_loss / optimal_loss;
}

/// Suboptimality of the greedy reference from `start`: the loss of the set it
/// stops at over the enumerated optimum, both evaluated from scratch.
template <SetLossModel M>
double reference_suboptimality(const M& model, const PartialView& start) {
  auto cursor = model.cursor(start);
  greedy_rollout(cursor, model.lambda());
  const double reference = model.evaluate(cursor.view()).combined(model.lambda());
  return suboptimality_ratio(reference, brute_force_optimal(model, start).loss);
}

/// Max suboptimality over every state on the reference trajectory from the
/// empty view.
template <SetLossModel M>
double trajectory_alpha(const M& model) {
  auto cursor = model.cursor(PartialView(model.num_parts()));
  std::vector<PartialView> states{cursor.view()};
  greedy_rollout(cursor, model.lambda());
  // Every prefix of the terminal view is a state of the same trajectory.
  const auto order = cursor.view().observed();
  PartialView prefix(model.num_parts());
  for (std::size_t t = 0; t < order.size(); ++t) {
    prefix.acquire(order[t]);
    states.push_back(prefix);
  }
  double alpha = 1.0;
  for (const auto& s : states) alpha = std::max(alpha, reference_suboptimality(model, s));
  return alpha;
}

/// A set loss whose parts contribute independently: task loss is
/// base - sum of the gains of the acquired parts, plus lambda * |S| / n.
/// Sums run in part-index order so equal sets give bit-identical losses.
class ModularLoss {
 public:
  ModularLoss(double base, std::vector<double> gains, double lambda);

  class Cursor {
   public:
    const PartialView& view() const { return view_; }
    LossTerms current() const { return model_->evaluate(view_); }
    LossTerms with_part(std::size_t part) const { return model_->evaluate(view_.with(part)); }
    void acquire(std::size_t part) { view_.acquire(part); }

   private:
    friend class ModularLoss;
    Cursor(const ModularLoss& model, PartialView view) : model_(&model), view_(std::move(view)) {}
    const ModularLoss* model_;
    PartialView view_;
  };

  std::size_t num_parts() const { return gains_.size(); }
  double lambda() const { return lambda_; }
  std::span<const double> gains() const { return gains_; }
  LossTerms evaluate(const PartialView& view) const;
  Cursor cursor(const PartialView& view) const { return Cursor(*this, view); }

 private:
  double base_;
  std::vector<double> gains_;
  double lambda_;
};

/// Max suboptimality of the reference over instances and the states along
/// its trajectories. Throws std::length_error past the enumeration guard.
double measure_alpha(std::span<const PartedInstance> sample, const TaskPredictor& predictor,
                     const LossConfig& loss);
double measure_alpha(std::span<const ModularLoss> models);

/// Empirical check of the regret bound J(pi) - J(pi*) <= T * delta with
/// delta = eps_c * (delta_max + lambda * C + (1 - 1/alpha) * q_star_max).
/// Every maximum is over the sampled states only.
struct RegretAuditReport {
  std::size_t instances = 0;
  std::size_t states = 0;
  std::size_t horizon = 0;        ///< T = n + 1
  double epsilon_c = 0.0;         ///< disagreement rate on the learned policy's states
  double alpha_hat = 1.0;
  double delta_max_hat = 0.0;     ///< largest task-loss change from one insertion/deletion/substitution
  double q_star_max_hat = 0.0;    ///< largest reference cost-to-go
  double per_part_cost = 0.0;     ///< lambda * (cost of one part) = lambda / n
  double delta_hat = 0.0;
  double j_policy = 0.0;          ///< mean terminal combined loss of the learned policy
  double j_reference = 0.0;       ///< mean terminal combined loss of the reference
  double empirical_regret = 0.0;
  double bound = 0.0;             ///< T * delta_hat
  double slack = 0.0;
  bool bound_satisfied = false;

  bool all_finite() const;
};

struct AuditConfig {
  double slack = 0.01;
};

RegretAuditReport regret_audit(std::span<const PartedInstance> sample,
                               const TaskPredictor& predictor, std::span<const double> prior,
                               bool quadratic, const LossConfig& loss,
                               const SelectionPolicy& policy, const AuditConfig& cfg = {});
RegretAuditReport regret_audit(std::span<const PartedInstance> sample, const ModelBundle& bundle,
                               const AuditConfig& cfg = {});

/// "key = value" lines.
void write_report(std::ostream& out, const RegretAuditReport& report);
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const RegretAuditReport& report);

}  // namespace aia
