#include "aia/selector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "binary_io.hpp"

namespace aia {

namespace {

constexpr std::string_view kPolicyMagic = "AIAS";
constexpr std::uint32_t kPolicyVersion = 1;

}  // namespace

std::size_t state_dimension(std::size_t num_classes, bool quadratic) {
  const std::size_t d = 2 * num_classes + 4;
  return quadratic ? d + d * (d + 1) / 2 : d;
}

StateFeatures featurize_state(const Prediction& pred, std::span<const double> prior,
                              const PartialView& view, bool quadratic) {
  const std::size_t k = pred.num_classes();
  if (prior.size() != k) {
    throw std::invalid_argument("class prior has " + std::to_string(prior.size()) +
                                " entries, prediction has " + std::to_string(k));
  }
  StateFeatures sf;
  sf.quadratic = quadratic;
  sf.scores = pred.scores();

  const auto& probs = pred.probs();
  double best = 0.0;
  double second = 0.0;
  for (double p : probs) {
    if (p > best) {
      second = best;
      best = p;
    } else if (p > second) {
      second = p;
    }
  }
  sf.margin = best - second;

  // Zero prior mass is floored like the prediction so the divergence stays finite.
  double kl = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    kl += probs[c] * std::log(probs[c] / std::max(prior[c], kProbabilityFloor));
  }
  sf.kl_to_prior = std::max(kl, 0.0);

  sf.argmax_onehot.assign(k, 0.0);
  sf.argmax_onehot[pred.argmax()] = 1.0;
  sf.steps = view.size();
  sf.steps_fraction = fraction_acquired(view);

  auto& v = sf.values;
  v.reserve(state_dimension(k, quadratic));
  v.insert(v.end(), sf.scores.begin(), sf.scores.end());
  v.push_back(sf.margin);
  v.push_back(sf.kl_to_prior);
  v.insert(v.end(), sf.argmax_onehot.begin(), sf.argmax_onehot.end());
  v.push_back(static_cast<double>(sf.steps));
  v.push_back(sf.steps_fraction);
  if (quadratic) {
    const std::size_t d = v.size();
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) v.push_back(v[i] * v[j]);
    }
  }
  return sf;
}

Policy::Policy(std::size_t num_parts, std::size_t state_dim, double learn_rate)
    : num_parts_(num_parts), state_dim_(state_dim), learn_rate_(0.0) {
  if (num_parts == 0) throw std::invalid_argument("a policy needs at least one part");
  if (state_dim == 0) throw std::invalid_argument("a policy needs a non-empty state");
  set_learn_rate(learn_rate);
  weights_.assign(num_actions() * (state_dim_ + 1), 0.0);
  grad_sq_.assign(weights_.size(), 0.0);
}

void Policy::set_learn_rate(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("learn rate must be finite and non-negative");
  }
  learn_rate_ = rate;
}

std::size_t Policy::slot(Action a) const {
  const std::size_t index = a.is_stop() ? num_parts_ : a.part();
  if (index > num_parts_) {
    throw std::out_of_range(to_string(a) + " is not an action of a " +
                            std::to_string(num_parts_) + "-part policy");
  }
  return index * (state_dim_ + 1);
}

void Policy::check_state(std::span<const double> state) const {
  if (state.size() != state_dim_) {
    throw std::invalid_argument("state has " + std::to_string(state.size()) +
                                " features, policy expects " + std::to_string(state_dim_));
  }
}

std::span<const double> Policy::regressor(Action a) const {
  return {weights_.data() + slot(a), state_dim_ + 1};
}

std::span<double> Policy::regressor(Action a) {
  return {weights_.data() + slot(a), state_dim_ + 1};
}

double Policy::predicted_cost(Action a, std::span<const double> state) const {
  check_state(state);
  const auto w = regressor(a);
  double s = w[state_dim_];
  for (std::size_t j = 0; j < state_dim_; ++j) s += w[j] * state[j];
  return s;
}

Action Policy::act(const StateFeatures& sf, std::span<const Action> allowed) const {
  if (allowed.empty()) throw std::invalid_argument("no allowed actions");
  std::vector<Action> ordered(allowed.begin(), allowed.end());
  std::sort(ordered.begin(), ordered.end());
  Action best = ordered.front();
  double best_cost = predicted_cost(best, sf.values);
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    const double c = predicted_cost(ordered[i], sf.values);
    if (c < best_cost) {
      best = ordered[i];
      best_cost = c;
    }
  }
  return best;
}

std::vector<double> Policy::gradient(Action a, std::span<const double> state,
                                     double target) const {
  const double residual = predicted_cost(a, state) - target;
  std::vector<double> grad(state_dim_ + 1);
  for (std::size_t j = 0; j < state_dim_; ++j) grad[j] = residual * state[j];
  grad[state_dim_] = residual;
  return grad;
}

void Policy::update(const CostExample& ex) {
  if (ex.allowed.size() != ex.costs.size()) {
    throw std::invalid_argument("cost vector does not match the allowed action set");
  }
  const auto& x = ex.state.values;
  check_state(x);
  ++update_count_;
  if (learn_rate_ == 0.0) return;
  std::vector<double> step(state_dim_ + 1);
  for (std::size_t i = 0; i < ex.allowed.size(); ++i) {
    const std::size_t base = slot(ex.allowed[i]);
    const auto grad = gradient(ex.allowed[i], x, ex.costs[i]);
    const double residual = grad[state_dim_];
    if (residual == 0.0) continue;
    double change = 0.0;
    for (std::size_t j = 0; j <= state_dim_; ++j) {
      const double g = grad[j];
      if (g == 0.0) {
        step[j] = 0.0;
        continue;
      }
      grad_sq_[base + j] += g * g;
      step[j] = -learn_rate_ * g / std::sqrt(grad_sq_[base + j]);
      change += step[j] * (j < state_dim_ ? x[j] : 1.0);
    }
    // change has the sign of -residual; never overshoot the target.
    const double scale = std::abs(change) > std::abs(residual) ? std::abs(residual / change) : 1.0;
    for (std::size_t j = 0; j <= state_dim_; ++j) weights_[base + j] += scale * step[j];
  }
}

void Policy::save(std::ostream& out) const {
  detail::write_magic(out, kPolicyMagic, kPolicyVersion);
  detail::write_pod<std::uint64_t>(out, num_parts_);
  detail::write_pod<std::uint64_t>(out, state_dim_);
  detail::write_pod<double>(out, learn_rate_);
  detail::write_pod<std::uint64_t>(out, update_count_);
  detail::write_doubles(out, weights_);
  detail::write_doubles(out, grad_sq_);
}

Policy Policy::load(std::istream& in) {
  detail::expect_magic(in, kPolicyMagic, kPolicyVersion);
  const auto parts = detail::read_pod<std::uint64_t>(in);
  const auto dim = detail::read_pod<std::uint64_t>(in);
  const auto rate = detail::read_pod<double>(in);
  const auto updates = detail::read_pod<std::uint64_t>(in);
  if (parts == 0 || parts > (1u << 20) || dim == 0 || dim > (1u << 20)) {
    throw std::runtime_error("corrupt policy header");
  }
  Policy p(parts, dim, rate);
  p.update_count_ = updates;
  p.weights_ = detail::read_doubles(in, p.weights_.size());
  p.grad_sq_ = detail::read_doubles(in, p.grad_sq_.size());
  if (p.weights_.size() != p.grad_sq_.size() || p.weights_.size() != (parts + 1) * (dim + 1)) {
    throw std::runtime_error("policy weight block has the wrong size");
  }
  return p;
}

Policy average_policies(std::span<const Policy> policies) {
  if (policies.empty()) throw std::invalid_argument("cannot average an empty policy list");
  const Policy& first = policies.front();
  Policy avg(first.num_parts_, first.state_dim_, first.learn_rate_);
  for (const auto& p : policies) {
    if (p.num_parts_ != first.num_parts_ || p.state_dim_ != first.state_dim_) {
      throw std::invalid_argument("cannot average policies of different shapes");
    }
    avg.update_count_ = std::max(avg.update_count_, p.update_count_);
    for (std::size_t j = 0; j < avg.weights_.size(); ++j) {
      avg.weights_[j] += p.weights_[j];
      avg.grad_sq_[j] += p.grad_sq_[j];
    }
  }
  const double n = static_cast<double>(policies.size());
  for (std::size_t j = 0; j < avg.weights_.size(); ++j) {
    avg.weights_[j] /= n;
    avg.grad_sq_[j] /= n;
  }
  return avg;
}

void PolicyAverage::add(const Policy& snapshot) {
  ++count_;
  if (!mean_) {
    mean_ = snapshot;
    return;
  }
  Policy& m = *mean_;
  if (snapshot.num_parts_ != m.num_parts_ || snapshot.state_dim_ != m.state_dim_) {
    throw std::invalid_argument("cannot average policies of different shapes");
  }
  const double inv = 1.0 / static_cast<double>(count_);
  m.update_count_ = std::max(m.update_count_, snapshot.update_count_);
  m.learn_rate_ = snapshot.learn_rate_;
  for (std::size_t j = 0; j < m.weights_.size(); ++j) {
    m.weights_[j] += (snapshot.weights_[j] - m.weights_[j]) * inv;
    m.grad_sq_[j] += (snapshot.grad_sq_[j] - m.grad_sq_[j]) * inv;
  }
}

const Policy& PolicyAverage::mean() const {
  if (!mean_) throw std::logic_error("no policy snapshots have been averaged");
  return *mean_;
}

}  // namespace aia
