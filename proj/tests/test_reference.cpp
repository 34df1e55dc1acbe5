#include <doctest.h>

#include <cmath>
#include <limits>

#include "aia/oracle.hpp"
#include "aia/reference.hpp"
#include "fixtures.hpp"

using namespace aia;
using aia::testing::make_instance;
using aia::testing::random_instance;
using aia::testing::randomize;

namespace {

// One-step lookahead recomputed from scratch for every action.
double one_step_loss(const ReferenceContext& ctx, const PartialView& view, Action a) {
  const PartialView next = a.is_stop() ? view : view.with(a.part());
  const auto pred = ctx.predictor().predict(featurize_partial(ctx.instance(), next));
  return combined_loss(pred, ctx.instance().label, next, ctx.loss());
}

LossConfig config(double lambda, TaskLossKind kind) {
  LossConfig c;
  c.lambda = lambda;
  c.task_loss = kind;
  return c;
}

}  // namespace

TEST_CASE("forced stop when a part costs more than any task loss drop") {
  Rng rng(3);
  TaskPredictor p(5, 3, 4);
  randomize(p, rng, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = random_instance(rng, 3, 4, 5);
    const ReferenceContext ctx(inst, p, config(4.5, TaskLossKind::zero_one));
    PartialView v(4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(reference_action(ctx, v) == Action::stop());
      v.acquire(i);
    }
    CHECK(rollout_reference(ctx, PartialView(4)).terminal.empty());
  }
}

TEST_CASE("the only part that fixes the prediction is acquired") {
  // Part 1 carries feature 1, which points at class 1; part 0 is neutral.
  TaskPredictor p(2, 2, 2);
  p.weight(1, 1) = 3.0;
  p.weight(0, p.bias_slot()) = 0.5;
  const auto inst = make_instance(1, {{{0, 1.0}}, {{1, 1.0}}});
  const ReferenceContext ctx(inst, p, config(0.1, TaskLossKind::zero_one));
  const auto allowed = action_set(PartialView(2));
  double best = std::numeric_limits<double>::infinity();
  Action expected = Action::stop();
  for (auto a : allowed) {
    const double l = one_step_loss(ctx, PartialView(2), a);
    if (l < best) {
      best = l;
      expected = a;
    }
  }
  CHECK(expected == Action::acquire(1));
  CHECK(reference_action(ctx, PartialView(2)) == Action::acquire(1));
  const auto r = rollout_reference(ctx, PartialView(2));
  CHECK(r.terminal == PartialView(2, {1}));
  CHECK(r.prediction.argmax() == 1);
}

TEST_CASE("exhausted parts force stop and the full prediction") {
  Rng rng(5);
  TaskPredictor p(4, 3, 3);
  randomize(p, rng);
  const auto inst = random_instance(rng, 3, 3, 4);
  const ReferenceContext ctx(inst, p, config(0.0, TaskLossKind::log_loss));
  const auto full = PartialView::full_view(3);
  CHECK(reference_action(ctx, full) == Action::stop());
  const auto r = rollout_reference(ctx, full);
  CHECK(r.terminal == full);
  const auto direct = p.predict(featurize_partial(inst, full));
  for (std::size_t k = 0; k < 3; ++k) CHECK(r.prediction.probs()[k] == doctest::Approx(direct.probs()[k]));
}

TEST_CASE("reference action is a from-scratch one-step argmin") {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    TaskPredictor p(5, 3, 5);
    randomize(p, rng, 1.5);
    const auto inst = random_instance(rng, 3, 5, 5);
    const double lambda = uniform_unit(rng) * 3.0;
    const auto kind = trial % 2 ? TaskLossKind::zero_one : TaskLossKind::log_loss;
    const ReferenceContext ctx(inst, p, config(lambda, kind));
    PartialView v(5);
    for (std::size_t i = 0; i < 5; ++i) {
      if (uniform_unit(rng) < 0.3) v.acquire(i);
    }
    const Action chosen = reference_action(ctx, v);
    CHECK((chosen.is_stop() || !v.contains(chosen.part())));
    double best = std::numeric_limits<double>::infinity();
    for (auto a : action_set(v)) best = std::min(best, one_step_loss(ctx, v, a));
    CHECK(one_step_loss(ctx, v, chosen) <= best + 1e-9);
    // Stop wins ties.
    if (one_step_loss(ctx, v, Action::stop()) < best + 1e-12 && !chosen.is_stop()) {
      CHECK(one_step_loss(ctx, v, chosen) < one_step_loss(ctx, v, Action::stop()));
    }
  }
}

TEST_CASE("incremental cursor agrees with from-scratch evaluation") {
  Rng rng(29);
  TaskPredictor p(5, 4, 6);
  randomize(p, rng);
  const auto inst = random_instance(rng, 4, 6, 5);
  const ReferenceContext ctx(inst, p, config(0.7, TaskLossKind::log_loss));
  auto cursor = ctx.cursor(PartialView(6));
  for (std::size_t i : {2u, 0u, 5u}) {
    const auto ahead = cursor.with_part(i);
    cursor.acquire(i);
    const auto exact = ctx.evaluate(cursor.view());
    CHECK(ahead.task == doctest::Approx(exact.task).epsilon(1e-12));
    CHECK(cursor.current().task == doctest::Approx(exact.task).epsilon(1e-12));
    CHECK(cursor.current().acquisition == exact.acquisition);
  }
}

TEST_CASE("roll-outs terminate and never beat the optimum or lose to stopping") {
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    TaskPredictor p(5, 3, 5);
    randomize(p, rng, 1.5);
    const auto inst = random_instance(rng, 3, 5, 5);
    const double lambda = uniform_unit(rng) * 2.0;
    const ReferenceContext ctx(inst, p, config(lambda, TaskLossKind::log_loss));
    PartialView start(5);
    if (trial % 3 == 0) start.acquire(uniform_below(rng, 5));
    const auto r = rollout_reference(ctx, start);
    CHECK(r.terminal.size() <= 5);
    const double reference = ctx.evaluate(r.terminal).combined(lambda);
    const double stop_now = ctx.evaluate(start).combined(lambda);
    const double optimum = brute_force_optimal(ctx, start).loss;
    CHECK(reference <= stop_now + 1e-12);
    CHECK(optimum <= reference + 1e-12);
  }
}

TEST_CASE("more lambda never means more parts") {
  Rng rng(41);
  const double lambdas[] = {0.0, 0.5, 1.0, 2.0, 4.0, 20.0};
  for (int trial = 0; trial < 100; ++trial) {
    TaskPredictor p(5, 3, 6);
    randomize(p, rng, 1.5);
    const auto inst = random_instance(rng, 3, 6, 5);
    for (auto kind : {TaskLossKind::log_loss, TaskLossKind::zero_one}) {
      std::size_t last = 7;
      for (double lambda : lambdas) {
        const ReferenceContext ctx(inst, p, config(lambda, kind));
        const std::size_t used = rollout_reference(ctx, PartialView(6)).terminal.size();
        CHECK(used <= last);
        last = used;
      }
    }
  }
}

TEST_CASE("greedy reaches the optimum on modular losses") {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 6);
    std::vector<double> gains(n);
    double base = 0.0;
    for (auto& g : gains) {
      g = static_cast<double>(uniform_below(rng, 16)) / 8.0 - 0.5;
      base += std::max(g, 0.0);
    }
    // Per-part cost on an odd sixteenth: never equal to a gain.
    const double lambda = static_cast<double>(n) * static_cast<double>(2 * uniform_below(rng, 8) + 1) / 16.0;
    const ModularLoss model(base + 1.0, gains, lambda);
    auto cursor = model.cursor(PartialView(n));
    greedy_rollout(cursor, lambda);
    const double greedy = model.evaluate(cursor.view()).combined(lambda);
    CHECK(greedy == brute_force_optimal(model).loss);
  }
}

TEST_CASE("reference context checks its inputs") {
  TaskPredictor p(3, 2, 2);
  CHECK_THROWS_AS(ReferenceContext(make_instance(2, {{}, {}}), p, LossConfig{}), std::out_of_range);
  CHECK_THROWS_AS(ReferenceContext(make_instance(0, {{}}), p, LossConfig{}), std::invalid_argument);
  LossConfig bad;
  bad.lambda = -1.0;
  CHECK_THROWS_AS(ReferenceContext(make_instance(0, {{}, {}}), p, bad), std::invalid_argument);
}
