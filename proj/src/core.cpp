#include "aia/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aia {

void validate_instance(const PartedInstance& instance, unsigned hash_bits) {
  if (instance.parts.empty()) {
    throw std::invalid_argument("instance '" + instance.id + "' has no parts");
  }
  const std::uint64_t limit = std::uint64_t{1} << hash_bits;
  for (const auto& bag : instance.parts) {
    for (const auto& f : bag) {
      if (f.index >= limit) {
        throw std::invalid_argument("instance '" + instance.id + "': feature index " +
                                    std::to_string(f.index) + " exceeds hash space of " +
                                    std::to_string(hash_bits) + " bits");
      }
    }
  }
}

PartialView::PartialView(std::size_t num_parts) : num_parts_(num_parts), mask_(num_parts, false) {}

PartialView::PartialView(std::size_t num_parts, std::vector<std::size_t> observed)
    : PartialView(num_parts) {
  observed_.reserve(observed.size());
  for (auto part : observed) acquire(part);
}

bool PartialView::contains(std::size_t part) const { return part < num_parts_ && mask_[part]; }

std::vector<std::size_t> PartialView::sorted() const {
  std::vector<std::size_t> out(observed_);
  std::sort(out.begin(), out.end());
  return out;
}

void PartialView::acquire(std::size_t part) {
  if (part >= num_parts_) {
    throw std::out_of_range("part " + std::to_string(part) + " out of range for " +
                            std::to_string(num_parts_) + " parts");
  }
  if (mask_[part]) {
    throw std::invalid_argument("part " + std::to_string(part) + " already observed");
  }
  mask_[part] = true;
  observed_.push_back(part);
}

PartialView PartialView::with(std::size_t part) const {
  PartialView next(*this);
  next.acquire(part);
  return next;
}

PartialView PartialView::full_view(std::size_t num_parts) {
  std::vector<std::size_t> all(num_parts);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return PartialView(num_parts, std::move(all));
}

std::string to_string(Action action) {
  return action.is_stop() ? std::string("stop") : "acquire(" + std::to_string(action.part()) + ")";
}

std::vector<Action> action_set(const PartialView& view) {
  std::vector<Action> actions;
  actions.reserve(view.num_parts() - view.size() + 1);
  actions.push_back(Action::stop());
  for (std::size_t i = 0; i < view.num_parts(); ++i) {
    if (!view.contains(i)) actions.push_back(Action::acquire(i));
  }
  return actions;
}

double fraction_acquired(const PartialView& view) {
  if (view.num_parts() == 0) return 0.0;
  return static_cast<double>(view.size()) / static_cast<double>(view.num_parts());
}

std::string to_string(TaskLossKind kind) {
  return kind == TaskLossKind::zero_one ? "zero-one" : "log-loss";
}

TaskLossKind parse_task_loss(const std::string& name) {
  if (name == "zero-one" || name == "zero_one" || name == "01") return TaskLossKind::zero_one;
  if (name == "log-loss" || name == "log_loss" || name == "log") return TaskLossKind::log_loss;
  throw std::invalid_argument("unknown task loss '" + name + "'");
}

void LossConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be a finite non-negative number");
  }
}

Prediction Prediction::from_probabilities(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("prediction needs at least one class");
  Prediction pred;
  pred.probs_.resize(probs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (!std::isfinite(probs[k]) || probs[k] < 0.0) {
      throw std::invalid_argument("class probabilities must be finite and non-negative");
    }
    pred.probs_[k] = std::max(probs[k], kProbabilityFloor);
    total += pred.probs_[k];
  }
  pred.scores_.resize(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    pred.probs_[k] /= total;
    pred.scores_[k] = -std::log(pred.probs_[k]);
    if (pred.probs_[k] > pred.probs_[pred.argmax_]) pred.argmax_ = k;
  }
  return pred;
}

Prediction Prediction::from_logits(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("prediction needs at least one class");
  const double top = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(top)) throw std::invalid_argument("non-finite class score");
  std::vector<double> probs(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    probs[k] = std::exp(logits[k] - top);
    total += probs[k];
  }
  for (auto& p : probs) p /= total;
  return from_probabilities(probs);
}

double task_loss(const Prediction& pred, std::size_t label, TaskLossKind kind) {
  if (label >= pred.num_classes()) {
    throw std::out_of_range("label " + std::to_string(label) + " out of range for " +
                            std::to_string(pred.num_classes()) + " classes");
  }
  switch (kind) {
    case TaskLossKind::zero_one:
      return pred.argmax() == label ? 0.0 : 1.0;
    case TaskLossKind::log_loss:
      return pred.scores()[label];
  }
  throw std::logic_error("unhandled task loss kind");
}

double combined_loss(const Prediction& pred, std::size_t label, const PartialView& view,
                     const LossConfig& cfg) {
  return task_loss(pred, label, cfg.task_loss) + cfg.lambda * cfg.acquisition(view);
}

}  // namespace aia
