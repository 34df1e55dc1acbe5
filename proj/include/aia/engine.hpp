#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "aia/core.hpp"
#include "aia/predictor.hpp"
#include "aia/reference.hpp"
#include "aia/selector.hpp"

namespace aia {

struct TrainConfig {
  std::size_t passes = 2;
  /// Zero-based pass at which predictor fine-tuning begins; the default
  /// starts it once the first pass is complete.
  std::size_t fine_tune_start_pass = 1;
  double predictor_learn_rate = TaskPredictor::kDefaultLearnRate;
  double policy_learn_rate = Policy::kDefaultLearnRate;
  bool quadratic = true;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// A trained predictor/selector pair and everything needed to run it.
struct ModelBundle {
  TaskPredictor predictor;
  Policy policy;
  std::vector<double> prior;
  LossConfig loss;
  TrainConfig train;

  std::size_t num_parts() const { return predictor.num_parts(); }
  std::size_t num_classes() const { return predictor.num_classes(); }

  /// Throws std::invalid_argument when a custom cost function is set.
  void save(std::ostream& out) const;
  static ModelBundle load(std::istream& in);
};

/// Exact equality of every serialised field.
bool same_model(const ModelBundle& a, const ModelBundle& b);

/// Empirical class frequencies.
std::vector<double> empirical_prior(std::span<const PartedInstance> data, std::size_t num_classes);

struct TrajectoryStep {
  PartialView view;
  Prediction prediction;
  Action action;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  Prediction prediction;
  PartialView terminal;

  std::size_t length() const { return steps.size(); }
};

/// Chooses the next action from a state. Receives the instance so that
/// label-aware policies can be wrapped for comparison.
using SelectionPolicy = std::function<Action(const PartedInstance& instance, const PartialView& view,
                                             const StateFeatures& state,
                                             std::span<const Action> allowed)>;

/// Wraps a learned policy; the policy must outlive the result.
SelectionPolicy learned_selection(const Policy& policy);

/// Sequential acquisition: predict, featurise the state, act; acquire and
/// repeat until the policy stops. With every part acquired only Stop is
/// allowed, so the loop ends after at most n + 1 steps.
Trajectory run_selection(const TaskPredictor& predictor, std::span<const double> prior,
                         bool quadratic, const PartedInstance& instance,
                         const SelectionPolicy& policy);

/// Test-time prediction with a trained bundle.
Trajectory predict(const ModelBundle& bundle, const PartedInstance& instance);

/// c - min(c).
std::vector<double> normalize_costs(std::vector<double> raw_losses);

/// Terminal combined loss of every allowed action at `view` when the action is
/// followed by a reference roll-out; unnormalised.
std::vector<double> deviation_losses(const ReferenceContext& ctx, const PartialView& view,
                                     std::span<const Action> allowed);

/// One-step deviations at `view`, normalised into a cost-sensitive example.
CostExample collect_deviation_costs(const ReferenceContext& ctx, const PartialView& view,
                                    StateFeatures state);

/// One predictor update on the terminal partial view towards the true label.
void finetune_step(TaskPredictor& predictor, const PartedInstance& instance,
                   const PartialView& terminal);

/// Joint training of the selector and the task predictor.
///
/// Per example: roll in with the current policy from the empty view,
/// collecting a cost-sensitive example at every visited state; on Stop,
/// fine-tune the predictor (when active); then update the policy with the
/// collected examples in order and fold the result into the running average.
class Trainer {
 public:
  using CostObserver = std::function<void(const CostExample&)>;

  Trainer(TaskPredictor initial, std::vector<double> prior, LossConfig loss, TrainConfig cfg);

  void set_observer(CostObserver observer) { observer_ = std::move(observer); }

  /// Returns the roll-in trajectory of the example.
  Trajectory train_example(const PartedInstance& instance, bool fine_tune);
  /// Visits `data` in a seeded shuffle; fine-tunes when pass >= fine_tune_start_pass.
  void run_pass(std::span<const PartedInstance> data, std::size_t pass);

  const TaskPredictor& predictor() const { return predictor_; }
  const Policy& policy() const { return policy_; }
  const PolicyAverage& average() const { return average_; }
  std::uint64_t cost_examples() const { return cost_examples_; }

  /// Bundle with the averaged policy; the current policy if nothing was averaged.
  ModelBundle bundle() const;

 private:
  TaskPredictor predictor_;
  Policy policy_;
  std::vector<double> prior_;
  LossConfig loss_;
  TrainConfig cfg_;
  PolicyAverage average_;
  Rng rng_;
  CostObserver observer_;
  std::uint64_t cost_examples_ = 0;
};

/// Runs cfg.passes passes. Throws std::invalid_argument on an empty dataset.
ModelBundle train(std::span<const PartedInstance> data, TaskPredictor initial,
                  std::vector<double> prior, LossConfig loss, const TrainConfig& cfg,
                  Trainer::CostObserver observer = {});

}  // namespace aia
