#include "aia/reference.hpp"

#include <stdexcept>

namespace aia {

ReferenceContext::ReferenceContext(const PartedInstance& instance, const TaskPredictor& predictor,
                                   LossConfig loss)
    : instance_(&instance), predictor_(&predictor), loss_(std::move(loss)),
      scores_(predictor, instance) {
  loss_.validate();
  if (instance.label >= predictor.num_classes()) {
    throw std::out_of_range("instance '" + instance.id + "' has label " +
                            std::to_string(instance.label) + " outside the predictor's " +
                            std::to_string(predictor.num_classes()) + " classes");
  }
}

LossTerms ReferenceContext::evaluate(const PartialView& view) const {
  const Prediction pred = predictor_->predict(featurize_partial(*instance_, view));
  return {task_loss(pred, instance_->label, loss_.task_loss), loss_.acquisition(view)};
}

ReferenceContext::Cursor::Cursor(const ReferenceContext& ctx, PartialView view)
    : ctx_(&ctx), view_(std::move(view)), logits_(ctx.scores_.logits(view_)),
      prediction_(Prediction::from_logits(logits_)) {
  if (view_.num_parts() != ctx.num_parts()) {
    throw std::invalid_argument("view does not match the instance's part count");
  }
  terms_ = {task_loss(prediction_, ctx.instance_->label, ctx.loss_.task_loss),
            ctx.loss_.acquisition(view_)};
}

double ReferenceContext::Cursor::acquisition_with(std::size_t part) const {
  if (!ctx_->loss_.cost) {
    return static_cast<double>(view_.size() + 1) / static_cast<double>(view_.num_parts());
  }
  return ctx_->loss_.acquisition(view_.with(part));
}

LossTerms ReferenceContext::Cursor::with_part(std::size_t part) const {
  const auto contrib = ctx_->scores_.part(part);
  std::vector<double> next(logits_);
  for (std::size_t k = 0; k < next.size(); ++k) next[k] += contrib[k];
  const Prediction pred = Prediction::from_logits(next);
  return {task_loss(pred, ctx_->instance_->label, ctx_->loss_.task_loss), acquisition_with(part)};
}

void ReferenceContext::Cursor::acquire(std::size_t part) {
  const double acquisition = acquisition_with(part);
  view_.acquire(part);
  const auto contrib = ctx_->scores_.part(part);
  for (std::size_t k = 0; k < logits_.size(); ++k) logits_[k] += contrib[k];
  prediction_ = Prediction::from_logits(logits_);
  terms_ = {task_loss(prediction_, ctx_->instance_->label, ctx_->loss_.task_loss), acquisition};
}

Action reference_action(const ReferenceContext& ctx, const PartialView& view) {
  return greedy_action(ctx.cursor(view), ctx.lambda());
}

ReferenceRollout rollout_reference(const ReferenceContext& ctx, const PartialView& view) {
  auto cursor = ctx.cursor(view);
  greedy_rollout(cursor, ctx.lambda());
  return {cursor.prediction(), cursor.view(), cursor.current()};
}

}  // namespace aia
