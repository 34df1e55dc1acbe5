#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "aia/core.hpp"
#include "aia/random.hpp"

namespace aia {

/// Partial input as seen by the task predictor: the summed union of the
/// observed bags plus one observed/unobserved indicator per part.
struct PartialFeatures {
  /// Sorted by index, duplicates summed.
  std::vector<Feature> sparse;
  std::vector<std::uint8_t> indicators;

  friend bool operator==(const PartialFeatures&, const PartialFeatures&) = default;
};

/// Unobserved parts contribute nothing. Bags are merged in part-index order,
/// so the result does not depend on acquisition order.
PartialFeatures featurize_partial(const PartedInstance& instance, const PartialView& view);

/// (flat weight offset, derivative) pairs.
using SparseGradient = std::vector<std::pair<std::size_t, double>>;

/// Hashed linear softmax classifier over partial inputs.
///
/// Weights are stored as one row per class laid out as
/// [hashed features | part indicators | bias].
class TaskPredictor {
 public:
  static constexpr double kDefaultLearnRate = 0.5;
  static constexpr unsigned kDefaultHashBits = 18;

  TaskPredictor(unsigned hash_bits, std::size_t num_classes, std::size_t num_parts,
                double learn_rate = kDefaultLearnRate);

  unsigned hash_bits() const { return hash_bits_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_parts() const { return num_parts_; }
  double learn_rate() const { return learn_rate_; }
  void set_learn_rate(double rate);

  std::size_t feature_space() const { return std::size_t{1} << hash_bits_; }
  std::size_t row_size() const { return feature_space() + num_parts_ + 1; }
  std::size_t indicator_slot(std::size_t part) const { return feature_space() + part; }
  std::size_t bias_slot() const { return feature_space() + num_parts_; }

  double weight(std::size_t cls, std::size_t slot) const { return weights_[cls * row_size() + slot]; }
  double& weight(std::size_t cls, std::size_t slot) { return weights_[cls * row_size() + slot]; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> weights() { return weights_; }

  /// Raw per-class linear scores. Throws std::out_of_range on a feature
  /// index outside the hash space or an indicator block of the wrong size.
  std::vector<double> logits(const PartialFeatures& f) const;
  Prediction predict(const PartialFeatures& f) const;

  /// Unsmoothed -log softmax(y); the objective `update` descends.
  double loss(const PartialFeatures& f, std::size_t label) const;
  SparseGradient gradient(const PartialFeatures& f, std::size_t label) const;
  /// One gradient step on (f, label) with step size learn_rate / |x|^2,
  /// where x is the full input vector including indicators and bias.
  void update(const PartialFeatures& f, std::size_t label);
  static double input_norm_sq(const PartialFeatures& f);

  void save(std::ostream& out) const;
  static TaskPredictor load(std::istream& in);

  friend bool operator==(const TaskPredictor&, const TaskPredictor&) = default;

 private:
  void check_features(const PartialFeatures& f) const;
  void check_label(std::size_t label) const;

  unsigned hash_bits_;
  std::size_t num_classes_;
  std::size_t num_parts_;
  double learn_rate_;
  std::vector<double> weights_;
};

/// Per-part contributions to the class scores of one instance under a fixed
/// predictor, so the scores of X' plus one part cost O(K) instead of a
/// re-featurisation.
class PartScores {
 public:
  PartScores(const TaskPredictor& predictor, const PartedInstance& instance);

  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_parts() const { return num_parts_; }
  /// Scores of the empty view (the biases).
  std::span<const double> base() const { return {contrib_.data(), num_classes_}; }
  std::span<const double> part(std::size_t i) const {
    return {contrib_.data() + (i + 1) * num_classes_, num_classes_};
  }
  /// Scores of `view`, accumulated in acquisition order.
  std::vector<double> logits(const PartialView& view) const;

 private:
  std::size_t num_classes_;
  std::size_t num_parts_;
  std::vector<double> contrib_;
};

/// Draws the view a training example is featurised under.
using SubsetSampler = std::function<PartialView(std::size_t num_parts, Rng& rng)>;

/// Subset size m uniform in {0..n}, then a uniform m-subset.
SubsetSampler uniform_subsets();
SubsetSampler full_views();
/// Always parts 0..k-1.
SubsetSampler prefix_views(std::size_t k);

struct PretrainConfig {
  unsigned hash_bits = TaskPredictor::kDefaultHashBits;
  double learn_rate = TaskPredictor::kDefaultLearnRate;
  std::size_t passes = 2;
  std::uint64_t seed = 0;
};

/// Online training on sampled partial views. Examples are visited in a seeded
/// shuffle per pass. Throws std::invalid_argument on an empty dataset.
TaskPredictor pretrain(std::span<const PartedInstance> data, std::size_t num_classes,
                       const SubsetSampler& sampler, const PretrainConfig& cfg);

}  // namespace aia
