#include "aia/harness/experiments.hpp"

#include <stdexcept>

namespace aia {

namespace {

void check_splits(const Dataset& train, const Dataset& test) {
  if (train.num_parts != test.num_parts || train.num_classes != test.num_classes) {
    throw std::invalid_argument("train and test splits differ in part or class count");
  }
}

}  // namespace

TaskPredictor pretrain_on(const Dataset& train, const ExperimentConfig& cfg) {
  return pretrain(train.instances, train.num_classes, uniform_subsets(), cfg.pretrain);
}

ModelBundle train_bundle(const Dataset& train, const TaskPredictor& initial,
                         const LossConfig& loss, const ExperimentConfig& cfg) {
  return aia::train(train.instances, initial, train.prior, loss, cfg.train);
}

std::vector<ParetoRow> sweep_lambda(const Dataset& train, const Dataset& test,
                                    std::span<const double> lambdas, const ExperimentConfig& cfg,
                                    std::vector<ModelBundle>* bundles) {
  if (lambdas.empty()) throw std::invalid_argument("lambda sweep needs at least one value");
  check_splits(train, test);
  const TaskPredictor initial = pretrain_on(train, cfg);
  std::vector<ParetoRow> rows;
  rows.reserve(lambdas.size());
  for (double lambda : lambdas) {
    LossConfig loss;
    loss.lambda = lambda;
    loss.task_loss = cfg.task_loss;
    auto bundle = train_bundle(train, initial, loss, cfg);
    rows.push_back(evaluate(bundle, test));
    if (bundles) bundles->push_back(std::move(bundle));
  }
  return rows;
}

std::vector<ParetoRow> static_baseline(const Dataset& train, const Dataset& test,
                                       std::span<const std::size_t> ks,
                                       const ExperimentConfig& cfg) {
  check_splits(train, test);
  for (auto k : ks) {
    if (k < 1 || k > train.num_parts) {
      throw std::out_of_range("static k=" + std::to_string(k) + " must lie in [1, " +
                              std::to_string(train.num_parts) + "]");
    }
  }
  PretrainConfig pcfg = cfg.pretrain;
  pcfg.passes = cfg.pretrain.passes + cfg.train.passes;
  pcfg.learn_rate = cfg.train.predictor_learn_rate;
  LossConfig loss;
  loss.task_loss = cfg.task_loss;
  std::vector<ParetoRow> rows;
  rows.reserve(ks.size());
  for (auto k : ks) {
    const auto predictor = pretrain(train.instances, train.num_classes, prefix_views(k), pcfg);
    rows.push_back(evaluate_static(predictor, test, k, loss));
  }
  return rows;
}

}  // namespace aia
