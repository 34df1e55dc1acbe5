#include "aia/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "binary_io.hpp"

namespace aia {

namespace {

constexpr std::string_view kPredictorMagic = "AIAP";
constexpr std::uint32_t kPredictorVersion = 1;

std::vector<double> softmax(std::vector<double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (auto& s : logits) {
    s = std::exp(s - top);
    total += s;
  }
  for (auto& s : logits) s /= total;
  return logits;
}

}  // namespace

PartialFeatures featurize_partial(const PartedInstance& instance, const PartialView& view) {
  if (view.num_parts() != instance.num_parts()) {
    throw std::invalid_argument("view covers " + std::to_string(view.num_parts()) +
                                " parts but instance '" + instance.id + "' has " +
                                std::to_string(instance.num_parts()));
  }
  PartialFeatures f;
  f.indicators.assign(instance.num_parts(), 0);
  std::vector<Feature> gathered;
  for (auto part : view.sorted()) {
    f.indicators[part] = 1;
    const auto& bag = instance.parts[part];
    gathered.insert(gathered.end(), bag.begin(), bag.end());
  }
  std::stable_sort(gathered.begin(), gathered.end(),
                   [](const Feature& a, const Feature& b) { return a.index < b.index; });
  for (const auto& feat : gathered) {
    if (!f.sparse.empty() && f.sparse.back().index == feat.index) {
      f.sparse.back().weight += feat.weight;
    } else {
      f.sparse.push_back(feat);
    }
  }
  return f;
}

TaskPredictor::TaskPredictor(unsigned hash_bits, std::size_t num_classes, std::size_t num_parts,
                             double learn_rate)
    : hash_bits_(hash_bits), num_classes_(num_classes), num_parts_(num_parts), learn_rate_(0.0) {
  if (hash_bits == 0 || hash_bits > 30) throw std::invalid_argument("hash_bits must be in [1, 30]");
  if (num_classes < 2) throw std::invalid_argument("a predictor needs at least two classes");
  if (num_parts == 0) throw std::invalid_argument("a predictor needs at least one part");
  set_learn_rate(learn_rate);
  weights_.assign(num_classes_ * row_size(), 0.0);
}

void TaskPredictor::set_learn_rate(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("learn rate must be finite and non-negative");
  }
  learn_rate_ = rate;
}

void TaskPredictor::check_features(const PartialFeatures& f) const {
  if (f.indicators.size() != num_parts_) {
    throw std::out_of_range("indicator block has " + std::to_string(f.indicators.size()) +
                            " slots, predictor expects " + std::to_string(num_parts_));
  }
  const std::size_t space = feature_space();
  for (const auto& feat : f.sparse) {
    if (feat.index >= space) {
      throw std::out_of_range("feature index " + std::to_string(feat.index) +
                              " overflows a " + std::to_string(hash_bits_) + "-bit hash space");
    }
  }
}

void TaskPredictor::check_label(std::size_t label) const {
  if (label >= num_classes_) {
    throw std::out_of_range("label " + std::to_string(label) + " out of range for " +
                            std::to_string(num_classes_) + " classes");
  }
}

std::vector<double> TaskPredictor::logits(const PartialFeatures& f) const {
  check_features(f);
  std::vector<double> scores(num_classes_);
  for (std::size_t k = 0; k < num_classes_; ++k) {
    const double* row = weights_.data() + k * row_size();
    double s = row[bias_slot()];
    for (std::size_t i = 0; i < num_parts_; ++i) {
      if (f.indicators[i]) s += row[indicator_slot(i)];
    }
    for (const auto& feat : f.sparse) s += row[feat.index] * feat.weight;
    scores[k] = s;
  }
  return scores;
}

Prediction TaskPredictor::predict(const PartialFeatures& f) const {
  return Prediction::from_logits(logits(f));
}

double TaskPredictor::loss(const PartialFeatures& f, std::size_t label) const {
  check_label(label);
  const auto scores = logits(f);
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double s : scores) total += std::exp(s - top);
  return top + std::log(total) - scores[label];
}

SparseGradient TaskPredictor::gradient(const PartialFeatures& f, std::size_t label) const {
  check_label(label);
  const auto probs = softmax(logits(f));
  SparseGradient grad;
  grad.reserve(num_classes_ * (f.sparse.size() + num_parts_ + 1));
  for (std::size_t k = 0; k < num_classes_; ++k) {
    const double residual = probs[k] - (k == label ? 1.0 : 0.0);
    const std::size_t row = k * row_size();
    for (const auto& feat : f.sparse) grad.emplace_back(row + feat.index, residual * feat.weight);
    for (std::size_t i = 0; i < num_parts_; ++i) {
      if (f.indicators[i]) grad.emplace_back(row + indicator_slot(i), residual);
    }
    grad.emplace_back(row + bias_slot(), residual);
  }
  return grad;
}

void TaskPredictor::update(const PartialFeatures& f, std::size_t label) {
  if (learn_rate_ == 0.0) {
    check_label(label);
    check_features(f);
    return;
  }
  const double step = learn_rate_ / input_norm_sq(f);
  for (const auto& [offset, g] : gradient(f, label)) weights_[offset] -= step * g;
}

double TaskPredictor::input_norm_sq(const PartialFeatures& f) {
  double norm = 1.0;  // bias
  for (const auto& feat : f.sparse) norm += feat.weight * feat.weight;
  for (auto on : f.indicators) norm += on ? 1.0 : 0.0;
  return norm;
}

void TaskPredictor::save(std::ostream& out) const {
  detail::write_magic(out, kPredictorMagic, kPredictorVersion);
  detail::write_pod<std::uint32_t>(out, hash_bits_);
  detail::write_pod<std::uint64_t>(out, num_classes_);
  detail::write_pod<std::uint64_t>(out, num_parts_);
  detail::write_pod<double>(out, learn_rate_);
  detail::write_doubles(out, weights_);
}

TaskPredictor TaskPredictor::load(std::istream& in) {
  detail::expect_magic(in, kPredictorMagic, kPredictorVersion);
  const auto hash_bits = detail::read_pod<std::uint32_t>(in);
  const auto classes = detail::read_pod<std::uint64_t>(in);
  const auto parts = detail::read_pod<std::uint64_t>(in);
  const auto rate = detail::read_pod<double>(in);
  if (hash_bits == 0 || hash_bits > 30 || classes < 2 || classes > (1u << 20) || parts == 0 ||
      parts > (1u << 20)) {
    throw std::runtime_error("corrupt predictor header");
  }
  TaskPredictor p(hash_bits, classes, parts, rate);
  auto weights = detail::read_doubles(in, p.weights_.size());
  if (weights.size() != p.weights_.size()) {
    throw std::runtime_error("predictor weight block has the wrong size");
  }
  p.weights_ = std::move(weights);
  return p;
}

PartScores::PartScores(const TaskPredictor& predictor, const PartedInstance& instance)
    : num_classes_(predictor.num_classes()), num_parts_(instance.num_parts()) {
  if (num_parts_ != predictor.num_parts()) {
    throw std::invalid_argument("instance '" + instance.id + "' has " +
                                std::to_string(num_parts_) + " parts, predictor expects " +
                                std::to_string(predictor.num_parts()));
  }
  contrib_.assign((num_parts_ + 1) * num_classes_, 0.0);
  const std::size_t space = predictor.feature_space();
  for (std::size_t k = 0; k < num_classes_; ++k) {
    contrib_[k] = predictor.weight(k, predictor.bias_slot());
  }
  for (std::size_t i = 0; i < num_parts_; ++i) {
    for (const auto& feat : instance.parts[i]) {
      if (feat.index >= space) {
        throw std::out_of_range("feature index " + std::to_string(feat.index) +
                                " overflows the predictor hash space");
      }
    }
    for (std::size_t k = 0; k < num_classes_; ++k) {
      double s = predictor.weight(k, predictor.indicator_slot(i));
      for (const auto& feat : instance.parts[i]) s += predictor.weight(k, feat.index) * feat.weight;
      contrib_[(i + 1) * num_classes_ + k] = s;
    }
  }
}

std::vector<double> PartScores::logits(const PartialView& view) const {
  if (view.num_parts() != num_parts_) {
    throw std::invalid_argument("view does not match the instance's part count");
  }
  std::vector<double> scores(base().begin(), base().end());
  for (auto i : view.observed()) {
    const auto c = part(i);
    for (std::size_t k = 0; k < num_classes_; ++k) scores[k] += c[k];
  }
  return scores;
}

SubsetSampler uniform_subsets() {
  return [](std::size_t n, Rng& rng) {
    const std::size_t m = uniform_below(rng, n + 1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
      std::swap(order[i], order[i + uniform_below(rng, n - i)]);
    }
    order.resize(m);
    return PartialView(n, std::move(order));
  };
}

SubsetSampler full_views() {
  return [](std::size_t n, Rng&) { return PartialView::full_view(n); };
}

SubsetSampler prefix_views(std::size_t k) {
  return [k](std::size_t n, Rng&) {
    if (k > n) throw std::invalid_argument("prefix longer than the instance");
    std::vector<std::size_t> first(k);
    std::iota(first.begin(), first.end(), std::size_t{0});
    return PartialView(n, std::move(first));
  };
}

TaskPredictor pretrain(std::span<const PartedInstance> data, std::size_t num_classes,
                       const SubsetSampler& sampler, const PretrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("cannot pretrain on an empty dataset");
  const std::size_t n = data.front().num_parts();
  TaskPredictor predictor(cfg.hash_bits, num_classes, n, cfg.learn_rate);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t pass = 0; pass < cfg.passes; ++pass) {
    shuffle(std::span<std::size_t>(order), rng);
    for (auto idx : order) {
      const auto& instance = data[idx];
      if (instance.num_parts() != n) {
        throw std::invalid_argument("instance '" + instance.id + "' has a different part count");
      }
      const auto view = sampler(n, rng);
      predictor.update(featurize_partial(instance, view), instance.label);
    }
  }
  return predictor;
}

}  // namespace aia
