#pragma once

#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "aia/core.hpp"
#include "aia/predictor.hpp"

namespace aia {

/// The two terms of the combined loss at one state.
struct LossTerms {
  double task = 0.0;
  double acquisition = 0.0;

  double combined(double lambda) const { return task + lambda * acquisition; }
};

/// Incremental view of a set loss: the loss at the current view, the loss
/// one part further, and the transition.
template <class C>
concept LossCursor = requires(C& cursor, const C& ccursor, std::size_t part) {
  { ccursor.view() } -> std::convertible_to<const PartialView&>;
  { ccursor.current() } -> std::same_as<LossTerms>;
  { ccursor.with_part(part) } -> std::same_as<LossTerms>;
  cursor.acquire(part);
};

/// A terminal loss defined on sets of acquired parts. `evaluate` is the
/// from-scratch evaluation; `cursor` the incremental one used by roll-outs.
template <class M>
concept SetLossModel = requires(const M& model, const PartialView& view) {
  { model.num_parts() } -> std::convertible_to<std::size_t>;
  { model.lambda() } -> std::convertible_to<double>;
  { model.evaluate(view) } -> std::same_as<LossTerms>;
  { model.cursor(view) } -> LossCursor;
};

/// Greedy one-step lookahead: the action whose resulting state has the
/// lowest combined loss, with Stop keeping the state unchanged. Ties go to
/// Stop, then to the lowest part index.
///
/// Candidate parts are ranked by (combined, task, index) and the stop test is
/// evaluated as a task-loss gain against a lambda-scaled cost increase. Both
/// are the same argmin, but in this form the chosen part never depends on
/// lambda under a uniform cost and the stopping point moves monotonically
/// with lambda.
template <LossCursor C>
Action greedy_action(const C& cursor, double lambda) {
  const PartialView& view = cursor.view();
  const LossTerms here = cursor.current();
  std::optional<std::size_t> best;
  LossTerms best_terms;
  double best_combined = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < view.num_parts(); ++i) {
    if (view.contains(i)) continue;
    const LossTerms t = cursor.with_part(i);
    const double c = t.combined(lambda);
    if (!best || c < best_combined || (c == best_combined && t.task < best_terms.task)) {
      best = i;
      best_terms = t;
      best_combined = c;
    }
  }
  if (!best) return Action::stop();
  const double gain = here.task - best_terms.task;
  const double extra_cost = lambda * (best_terms.acquisition - here.acquisition);
  return gain > extra_cost ? Action::acquire(*best) : Action::stop();
}

/// Applies greedy_action until it stops. At most n - |observed| acquisitions.
template <LossCursor C>
void greedy_rollout(C& cursor, double lambda) {
  for (;;) {
    const Action a = greedy_action(cursor, lambda);
    if (a.is_stop()) return;
    cursor.acquire(a.part());
  }
}

/// Label-aware loss model of one training instance under a predictor
/// snapshot. Holds references: the instance and predictor must outlive it,
/// and the predictor must not change while it is in use.
class ReferenceContext {
 public:
  ReferenceContext(const PartedInstance& instance, const TaskPredictor& predictor,
                   LossConfig loss);

  class Cursor {
   public:
    const PartialView& view() const { return view_; }
    LossTerms current() const { return terms_; }
    LossTerms with_part(std::size_t part) const;
    void acquire(std::size_t part);
    const Prediction& prediction() const { return prediction_; }

   private:
    friend class ReferenceContext;
    Cursor(const ReferenceContext& ctx, PartialView view);
    double acquisition_with(std::size_t part) const;

    const ReferenceContext* ctx_;
    PartialView view_;
    std::vector<double> logits_;
    Prediction prediction_;
    LossTerms terms_;
  };

  const PartedInstance& instance() const { return *instance_; }
  const TaskPredictor& predictor() const { return *predictor_; }
  const LossConfig& loss() const { return loss_; }
  const PartScores& part_scores() const { return scores_; }

  std::size_t num_parts() const { return instance_->num_parts(); }
  double lambda() const { return loss_.lambda; }
  /// Re-featurises `view` and runs the predictor from scratch.
  LossTerms evaluate(const PartialView& view) const;
  Cursor cursor(const PartialView& view) const { return Cursor(*this, view); }

 private:
  const PartedInstance* instance_;
  const TaskPredictor* predictor_;
  LossConfig loss_;
  PartScores scores_;
};

Action reference_action(const ReferenceContext& ctx, const PartialView& view);

struct ReferenceRollout {
  Prediction prediction;
  PartialView terminal;
  LossTerms terms;
};

/// Executes the reference policy from `view` until it stops.
ReferenceRollout rollout_reference(const ReferenceContext& ctx, const PartialView& view);

}  // namespace aia
