#include "aia/engine.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "binary_io.hpp"

namespace aia {

namespace {

constexpr std::string_view kBundleMagic = "AIAB";
constexpr std::uint32_t kBundleVersion = 1;

void check_shape(const TaskPredictor& predictor, const PartedInstance& instance) {
  if (instance.num_parts() != predictor.num_parts()) {
    throw std::invalid_argument("instance '" + instance.id + "' has " +
                                std::to_string(instance.num_parts()) + " parts, model expects " +
                                std::to_string(predictor.num_parts()));
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (passes < 1) throw std::invalid_argument("training needs at least one pass");
  if (fine_tune_start_pass > passes) {
    throw std::invalid_argument("fine_tune_start_pass exceeds the number of passes");
  }
}

void ModelBundle::save(std::ostream& out) const {
  if (loss.cost) throw std::invalid_argument("bundles with a custom cost function cannot be saved");
  detail::write_magic(out, kBundleMagic, kBundleVersion);
  predictor.save(out);
  policy.save(out);
  detail::write_doubles(out, prior);
  detail::write_pod<double>(out, loss.lambda);
  detail::write_pod<std::uint8_t>(out, loss.task_loss == TaskLossKind::zero_one ? 0 : 1);
  detail::write_pod<std::uint64_t>(out, train.passes);
  detail::write_pod<std::uint64_t>(out, train.fine_tune_start_pass);
  detail::write_pod<double>(out, train.predictor_learn_rate);
  detail::write_pod<double>(out, train.policy_learn_rate);
  detail::write_pod<std::uint8_t>(out, train.quadratic ? 1 : 0);
  detail::write_pod<std::uint64_t>(out, train.seed);
}

ModelBundle ModelBundle::load(std::istream& in) {
  detail::expect_magic(in, kBundleMagic, kBundleVersion);
  auto predictor = TaskPredictor::load(in);
  auto policy = Policy::load(in);
  auto prior = detail::read_doubles(in, predictor.num_classes());
  LossConfig loss;
  loss.lambda = detail::read_pod<double>(in);
  loss.task_loss = detail::read_pod<std::uint8_t>(in) == 0 ? TaskLossKind::zero_one
                                                            : TaskLossKind::log_loss;
  TrainConfig train;
  train.passes = detail::read_pod<std::uint64_t>(in);
  train.fine_tune_start_pass = detail::read_pod<std::uint64_t>(in);
  train.predictor_learn_rate = detail::read_pod<double>(in);
  train.policy_learn_rate = detail::read_pod<double>(in);
  train.quadratic = detail::read_pod<std::uint8_t>(in) != 0;
  train.seed = detail::read_pod<std::uint64_t>(in);
  if (prior.size() != predictor.num_classes() || policy.num_parts() != predictor.num_parts() ||
      policy.state_dim() != state_dimension(predictor.num_classes(), train.quadratic)) {
    throw std::runtime_error("bundle components disagree on shape");
  }
  return {std::move(predictor), std::move(policy), std::move(prior), std::move(loss), train};
}

bool same_model(const ModelBundle& a, const ModelBundle& b) {
  return a.predictor == b.predictor && a.policy == b.policy && a.prior == b.prior &&
         a.loss.lambda == b.loss.lambda && a.loss.task_loss == b.loss.task_loss &&
         static_cast<bool>(a.loss.cost) == static_cast<bool>(b.loss.cost) && a.train == b.train;
}

std::vector<double> empirical_prior(std::span<const PartedInstance> data, std::size_t num_classes) {
  if (data.empty()) throw std::invalid_argument("prior of an empty dataset");
  std::vector<double> prior(num_classes, 0.0);
  for (const auto& instance : data) {
    if (instance.label >= num_classes) {
      throw std::out_of_range("label " + std::to_string(instance.label) + " of instance '" +
                              instance.id + "' is not below " + std::to_string(num_classes));
    }
    prior[instance.label] += 1.0;
  }
  for (auto& p : prior) p /= static_cast<double>(data.size());
  return prior;
}

SelectionPolicy learned_selection(const Policy& policy) {
  return [&policy](const PartedInstance&, const PartialView&, const StateFeatures& state,
                   std::span<const Action> allowed) { return policy.act(state, allowed); };
}

Trajectory run_selection(const TaskPredictor& predictor, std::span<const double> prior,
                         bool quadratic, const PartedInstance& instance,
                         const SelectionPolicy& policy) {
  check_shape(predictor, instance);
  const PartScores scores(predictor, instance);
  const std::size_t n = instance.num_parts();
  Trajectory traj;
  PartialView view(n);
  std::vector<double> logits(scores.base().begin(), scores.base().end());
  for (;;) {
    Prediction pred = Prediction::from_logits(logits);
    const auto state = featurize_state(pred, prior, view, quadratic);
    const auto allowed = action_set(view);
    const Action a = policy(instance, view, state, allowed);
    if (std::find(allowed.begin(), allowed.end(), a) == allowed.end()) {
      throw std::logic_error("selection policy chose " + to_string(a) + ", which is not allowed");
    }
    traj.steps.push_back({view, pred, a});
    if (a.is_stop()) {
      traj.prediction = std::move(pred);
      traj.terminal = view;
      return traj;
    }
    view.acquire(a.part());
    const auto contrib = scores.part(a.part());
    for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += contrib[k];
  }
}

Trajectory predict(const ModelBundle& bundle, const PartedInstance& instance) {
  return run_selection(bundle.predictor, bundle.prior, bundle.train.quadratic, instance,
                       learned_selection(bundle.policy));
}

std::vector<double> normalize_costs(std::vector<double> raw_losses) {
  if (raw_losses.empty()) return raw_losses;
  const double lowest = *std::min_element(raw_losses.begin(), raw_losses.end());
  for (auto& c : raw_losses) c -= lowest;
  return raw_losses;
}

std::vector<double> deviation_losses(const ReferenceContext& ctx, const PartialView& view,
                                     std::span<const Action> allowed) {
  std::vector<double> losses;
  losses.reserve(allowed.size());
  for (const Action a : allowed) {
    auto cursor = ctx.cursor(view);
    if (!a.is_stop()) {
      cursor.acquire(a.part());
      greedy_rollout(cursor, ctx.lambda());
    }
    losses.push_back(cursor.current().combined(ctx.lambda()));
  }
  return losses;
}

CostExample collect_deviation_costs(const ReferenceContext& ctx, const PartialView& view,
                                    StateFeatures state) {
  CostExample ex;
  ex.state = std::move(state);
  ex.allowed = action_set(view);
  ex.costs = normalize_costs(deviation_losses(ctx, view, ex.allowed));
  return ex;
}

void finetune_step(TaskPredictor& predictor, const PartedInstance& instance,
                   const PartialView& terminal) {
  predictor.update(featurize_partial(instance, terminal), instance.label);
}

Trainer::Trainer(TaskPredictor initial, std::vector<double> prior, LossConfig loss,
                 TrainConfig cfg)
    : predictor_(std::move(initial)),
      policy_(predictor_.num_parts(), state_dimension(predictor_.num_classes(), cfg.quadratic),
              cfg.policy_learn_rate),
      prior_(std::move(prior)), loss_(std::move(loss)), cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
  loss_.validate();
  if (prior_.size() != predictor_.num_classes()) {
    throw std::invalid_argument("class prior does not match the predictor's class count");
  }
  predictor_.set_learn_rate(cfg_.predictor_learn_rate);
}

Trajectory Trainer::train_example(const PartedInstance& instance, bool fine_tune) {
  check_shape(predictor_, instance);
  std::vector<CostExample> collected;
  Trajectory traj;
  {
    const ReferenceContext ctx(instance, predictor_, loss_);
    auto cursor = ctx.cursor(PartialView(instance.num_parts()));
    for (;;) {
      const PartialView& view = cursor.view();
      auto state = featurize_state(cursor.prediction(), prior_, view, cfg_.quadratic);
      collected.push_back(collect_deviation_costs(ctx, view, state));
      const Action a = policy_.act(state, collected.back().allowed);
      traj.steps.push_back({view, cursor.prediction(), a});
      if (a.is_stop()) break;
      cursor.acquire(a.part());
    }
    traj.prediction = cursor.prediction();
    traj.terminal = cursor.view();
  }
  if (fine_tune) finetune_step(predictor_, instance, traj.terminal);
  for (const auto& ex : collected) {
    policy_.update(ex);
    ++cost_examples_;
    if (observer_) observer_(ex);
  }
  average_.add(policy_);
  return traj;
}

void Trainer::run_pass(std::span<const PartedInstance> data, std::size_t pass) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(std::span<std::size_t>(order), rng_);
  const bool fine_tune = pass >= cfg_.fine_tune_start_pass;
  for (auto idx : order) train_example(data[idx], fine_tune);
}

ModelBundle Trainer::bundle() const {
  return {predictor_, average_.count() > 0 ? average_.mean() : policy_, prior_, loss_, cfg_};
}

ModelBundle train(std::span<const PartedInstance> data, TaskPredictor initial,
                  std::vector<double> prior, LossConfig loss, const TrainConfig& cfg,
                  Trainer::CostObserver observer) {
  if (data.empty()) throw std::invalid_argument("cannot train on an empty dataset");
  Trainer trainer(std::move(initial), std::move(prior), std::move(loss), cfg);
  trainer.set_observer(std::move(observer));
  for (std::size_t pass = 0; pass < cfg.passes; ++pass) trainer.run_pass(data, pass);
  return trainer.bundle();
}

}  // namespace aia
