#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aia {

/// One hashed feature of a part.
struct Feature {
  std::uint32_t index = 0;
  double weight = 0.0;

  friend bool operator==(const Feature&, const Feature&) = default;
};

using FeatureBag = std::vector<Feature>;

enum class Difficulty { easy, hard };

/// An input decomposed into n acquirable parts, each a sparse feature bag.
struct PartedInstance {
  std::string id;
  std::size_t label = 0;
  std::vector<FeatureBag> parts;
  std::optional<Difficulty> difficulty;

  std::size_t num_parts() const { return parts.size(); }

  friend bool operator==(const PartedInstance&, const PartedInstance&) = default;
};

/// Throws std::invalid_argument when the instance has no parts or a feature
/// index does not fit in `hash_bits` bits.
void validate_instance(const PartedInstance& instance, unsigned hash_bits);

/// Parts acquired so far, in acquisition order.
class PartialView {
 public:
  PartialView() = default;
  explicit PartialView(std::size_t num_parts);
  PartialView(std::size_t num_parts, std::vector<std::size_t> observed);

  std::size_t num_parts() const { return num_parts_; }
  std::size_t size() const { return observed_.size(); }
  bool empty() const { return observed_.empty(); }
  bool full() const { return observed_.size() == num_parts_; }
  bool contains(std::size_t part) const;
  std::span<const std::size_t> observed() const { return observed_; }

  /// Observed indices in increasing order.
  std::vector<std::size_t> sorted() const;

  void acquire(std::size_t part);
  PartialView with(std::size_t part) const;

  static PartialView full_view(std::size_t num_parts);

  friend bool operator==(const PartialView&, const PartialView&) = default;

 private:
  std::size_t num_parts_ = 0;
  std::vector<std::size_t> observed_;
  std::vector<bool> mask_;
};

/// Acquire(part) or Stop.
class Action {
 public:
  static constexpr Action stop() { return Action(kStop); }
  static constexpr Action acquire(std::size_t part) { return Action(part); }

  constexpr bool is_stop() const { return part_ == kStop; }
  /// Part index; only meaningful when !is_stop().
  constexpr std::size_t part() const { return part_; }

  friend constexpr bool operator==(Action, Action) = default;

  /// Stop orders before every Acquire; acquisitions order by part index.
  friend constexpr bool operator<(Action a, Action b) {
    if (a.is_stop() != b.is_stop()) return a.is_stop();
    return a.part_ < b.part_;
  }

 private:
  static constexpr std::size_t kStop = static_cast<std::size_t>(-1);
  constexpr explicit Action(std::size_t part) : part_(part) {}
  std::size_t part_;
};

std::string to_string(Action action);

/// Stop first, then unobserved parts in increasing order.
std::vector<Action> action_set(const PartialView& view);

/// Acquisition cost of a view, in [0, 1].
using CostFunction = std::function<double(const PartialView&)>;

/// |observed| / n.
double fraction_acquired(const PartialView& view);

inline double acquisition_cost(const PartialView& view) { return fraction_acquired(view); }

enum class TaskLossKind { zero_one, log_loss };

std::string to_string(TaskLossKind kind);
TaskLossKind parse_task_loss(const std::string& name);

struct LossConfig {
  double lambda = 0.0;
  TaskLossKind task_loss = TaskLossKind::log_loss;
  /// Replaces |observed| / n when set.
  CostFunction cost;

  double acquisition(const PartialView& view) const {
    return cost ? cost(view) : fraction_acquired(view);
  }
  void validate() const;
};

/// Floor applied to every class probability before renormalising.
inline constexpr double kProbabilityFloor = 1e-6;

/// Smoothed class distribution with its negative log scores.
class Prediction {
 public:
  /// Smooths `probs` (floor, then renormalise). Throws on empty or
  /// non-finite input.
  static Prediction from_probabilities(std::span<const double> probs);
  /// Softmax of raw linear scores, then smoothing.
  static Prediction from_logits(std::span<const double> logits);

  std::size_t num_classes() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  /// -log(probs).
  const std::vector<double>& scores() const { return scores_; }
  /// Index of the largest probability; lowest index on ties.
  std::size_t argmax() const { return argmax_; }

 private:
  std::vector<double> probs_;
  std::vector<double> scores_;
  std::size_t argmax_ = 0;
};

/// Throws std::out_of_range when `label` is not a class of `pred`.
double task_loss(const Prediction& pred, std::size_t label, TaskLossKind kind);

/// task_loss + lambda * acquisition cost.
double combined_loss(const Prediction& pred, std::size_t label, const PartialView& view,
                     const LossConfig& cfg);

}  // namespace aia
