#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aia/engine.hpp"
#include "aia/harness/dataset.hpp"
#include "aia/harness/metrics.hpp"
#include "aia/predictor.hpp"

namespace aia {

struct ExperimentConfig {
  PretrainConfig pretrain;
  TrainConfig train;
  TaskLossKind task_loss = TaskLossKind::log_loss;
};

/// Predictor pretraining on uniformly sampled part subsets of `train`.
TaskPredictor pretrain_on(const Dataset& train, const ExperimentConfig& cfg);

/// Joint training on `train` from `initial` with the dataset's prior.
ModelBundle train_bundle(const Dataset& train, const TaskPredictor& initial,
                         const LossConfig& loss, const ExperimentConfig& cfg);

/// One pretrained predictor shared by every lambda; per lambda, joint training
/// on `train` and evaluation on `test`. Rows follow the order of `lambdas`.
/// `bundles`, when given, receives the trained models in the same order.
std::vector<ParetoRow> sweep_lambda(const Dataset& train, const Dataset& test,
                                    std::span<const double> lambdas, const ExperimentConfig& cfg,
                                    std::vector<ModelBundle>* bundles = nullptr);

/// Per k: a fresh predictor trained on the first-k view of every training
/// instance for pretrain.passes + train.passes passes, evaluated with parts
/// 0..k-1 forced. Rows report lambda = 0 losses. Throws std::out_of_range
/// for k outside [1, n].
std::vector<ParetoRow> static_baseline(const Dataset& train, const Dataset& test,
                                       std::span<const std::size_t> ks,
                                       const ExperimentConfig& cfg);

}  // namespace aia
