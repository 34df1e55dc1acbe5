#pragma once

#include <cstddef>
#include <cstdint>

#include "aia/harness/dataset.hpp"
#include "aia/predictor.hpp"

namespace aia {

/// Generator for desk-scale parted classification data.
///
/// Every part is a bag of `tokens_per_part` hashed tokens. Easy instances
/// carry `easy_informative` parts whose tokens come from the label's
/// vocabulary with probability `strong_signal`; hard instances carry
/// `hard_informative` parts at `weak_signal`. Informative parts sit at
/// uniformly random positions. Remaining tokens are shared noise, except that
/// each token of a non-informative part is drawn from a random other class
/// with probability `noise`. Token indices do not depend on the position.
struct SyntheticConfig {
  std::size_t num_classes = 5;
  std::size_t num_parts = 10;
  std::size_t train_size = 4000;
  std::size_t test_size = 1000;
  std::size_t tokens_per_part = 6;
  std::size_t class_vocabulary = 40;
  std::size_t noise_vocabulary = 400;
  std::size_t easy_informative = 2;
  std::size_t hard_informative = 1;
  double strong_signal = 0.9;
  double weak_signal = 0.65;
  double noise = 0.01;
  double hard_fraction = 0.2;
  double token_weight = 1.0;
  unsigned hash_bits = TaskPredictor::kDefaultHashBits;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct DatasetSplits {
  Dataset train;
  Dataset test;
};

/// Deterministic for a given config.
DatasetSplits generate_synthetic(const SyntheticConfig& cfg);

}  // namespace aia
