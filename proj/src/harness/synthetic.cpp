#include "aia/harness/synthetic.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "aia/harness/text.hpp"
#include "aia/random.hpp"

namespace aia {

void SyntheticConfig::validate() const {
  if (num_classes < 2) throw std::invalid_argument("synthetic data needs at least two classes");
  if (num_parts < 1) throw std::invalid_argument("synthetic data needs at least one part");
  if (train_size < 1 || test_size < 1) throw std::invalid_argument("split sizes must be at least 1");
  if (tokens_per_part < 1 || class_vocabulary < 1 || noise_vocabulary < 1) {
    throw std::invalid_argument("token and vocabulary counts must be at least 1");
  }
  if (easy_informative > num_parts || hard_informative > num_parts) {
    throw std::invalid_argument("more informative parts than parts");
  }
  for (double p : {strong_signal, weak_signal, noise, hard_fraction}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  if (hash_bits == 0 || hash_bits > 30) throw std::invalid_argument("hash_bits must be in [1, 30]");
}

namespace {

class TokenTable {
 public:
  explicit TokenTable(const SyntheticConfig& cfg) : cfg_(cfg) {
    class_tokens_.resize(cfg.num_classes);
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
      for (std::size_t j = 0; j < cfg.class_vocabulary; ++j) {
        class_tokens_[c].push_back(
            hash_feature("c" + std::to_string(c) + ":" + std::to_string(j), cfg.hash_bits));
      }
    }
    for (std::size_t j = 0; j < cfg.noise_vocabulary; ++j) {
      noise_tokens_.push_back(hash_feature("n:" + std::to_string(j), cfg.hash_bits));
    }
  }

  std::uint32_t class_token(std::size_t cls, Rng& rng) const {
    return class_tokens_[cls][uniform_below(rng, class_tokens_[cls].size())];
  }
  std::uint32_t noise_token(Rng& rng) const {
    return noise_tokens_[uniform_below(rng, noise_tokens_.size())];
  }
  std::uint32_t other_class_token(std::size_t cls, Rng& rng) const {
    std::size_t other = uniform_below(rng, cfg_.num_classes - 1);
    if (other >= cls) ++other;
    return class_token(other, rng);
  }

 private:
  const SyntheticConfig& cfg_;
  std::vector<std::vector<std::uint32_t>> class_tokens_;
  std::vector<std::uint32_t> noise_tokens_;
};

PartedInstance make_instance(const SyntheticConfig& cfg, const TokenTable& tokens,
                             std::string id, Rng& rng) {
  PartedInstance inst;
  inst.id = std::move(id);
  inst.label = uniform_below(rng, cfg.num_classes);
  const bool hard = uniform_unit(rng) < cfg.hard_fraction;
  inst.difficulty = hard ? Difficulty::hard : Difficulty::easy;
  const std::size_t informative = hard ? cfg.hard_informative : cfg.easy_informative;
  const double signal = hard ? cfg.weak_signal : cfg.strong_signal;

  std::vector<std::size_t> positions(cfg.num_parts);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  std::vector<bool> is_informative(cfg.num_parts, false);
  for (std::size_t i = 0; i < informative; ++i) {
    std::swap(positions[i], positions[i + uniform_below(rng, cfg.num_parts - i)]);
    is_informative[positions[i]] = true;
  }

  inst.parts.resize(cfg.num_parts);
  for (std::size_t p = 0; p < cfg.num_parts; ++p) {
    auto& bag = inst.parts[p];
    bag.reserve(cfg.tokens_per_part);
    for (std::size_t t = 0; t < cfg.tokens_per_part; ++t) {
      const double u = uniform_unit(rng);
      std::uint32_t index;
      if (is_informative[p]) {
        index = u < signal ? tokens.class_token(inst.label, rng) : tokens.noise_token(rng);
      } else {
        index = u < cfg.noise ? tokens.other_class_token(inst.label, rng) : tokens.noise_token(rng);
      }
      bag.push_back({index, cfg.token_weight});
    }
  }
  return inst;
}

std::string make_id(const char* prefix, std::size_t i) {
  std::string digits = std::to_string(i);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return std::string(prefix) + "-" + digits;
}

}  // namespace

DatasetSplits generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const TokenTable tokens(cfg);
  Rng rng(cfg.seed);
  std::vector<PartedInstance> train;
  train.reserve(cfg.train_size);
  for (std::size_t i = 0; i < cfg.train_size; ++i) {
    train.push_back(make_instance(cfg, tokens, make_id("train", i), rng));
  }
  std::vector<PartedInstance> test;
  test.reserve(cfg.test_size);
  for (std::size_t i = 0; i < cfg.test_size; ++i) {
    test.push_back(make_instance(cfg, tokens, make_id("test", i), rng));
  }
  return {Dataset::from_instances("synthetic-train", std::move(train), cfg.num_classes),
          Dataset::from_instances("synthetic-test", std::move(test), cfg.num_classes)};
}

}  // namespace aia
