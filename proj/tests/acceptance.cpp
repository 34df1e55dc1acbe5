// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "aia/engine.hpp"
#include "aia/harness/experiments.hpp"
#include "aia/harness/metrics.hpp"
#include "aia/harness/synthetic.hpp"
#include "aia/oracle.hpp"

using namespace aia;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double budget_seconds, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0.0 && secs >= budget_seconds) {
    v.pass = false;
    v.detail += "; over the " + std::to_string(static_cast<int>(budget_seconds)) + " s budget";
  }
  if (!v.pass) ++failures;
  std::printf("%s %d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

std::string bytes_of(const ModelBundle& b) {
  std::ostringstream out;
  b.save(out);
  return out.str();
}

// Shared by criteria 1 and 7: the default dataset and its lambda sweep.
struct DefaultRun {
  DatasetSplits data;
  std::vector<ParetoRow> dynamic;
  std::vector<ParetoRow> statics;
};

}  // namespace

int main() {
  const std::vector<double> lambdas{0.0, 0.5, 1.0, 2.0, 4.0};
  const std::vector<std::size_t> ks{2, 4, 6, 8, 10};
  DefaultRun def;

  run(1, "dynamic selection dominates the static baseline", 180.0, [&] {
    def.data = generate_synthetic(SyntheticConfig{});
    const ExperimentConfig cfg;
    def.dynamic = sweep_lambda(def.data.train, def.data.test, lambdas, cfg);
    def.statics = static_baseline(def.data.train, def.data.test, ks, cfg);
    Verdict v{true, ""};
    for (const auto& s : def.statics) {
      const double budget = s.avg_fraction_parts + 0.05;
      const ParetoRow* best = nullptr;
      for (const auto& d : def.dynamic) {
        if (d.avg_fraction_parts <= budget && (!best || d.macro_f1 > best->macro_f1)) best = &d;
      }
      const bool ok = best && best->macro_f1 >= s.macro_f1 - 0.01;
      v.pass = v.pass && ok;
      v.detail += fmt("k=%g static F1 %.3f", s.param, s.macro_f1);
      v.detail += best ? fmt(" vs lambda=%g frac %.3f F1 %.3f", best->param,
                             best->avg_fraction_parts, best->macro_f1)
                       : std::string(" vs no dynamic row within budget");
      v.detail += ok ? "; " : " (not dominated); ";
    }
    return v;
  });

  run(2, "reference acquisitions are non-increasing in lambda", 0.0, [] {
    SyntheticConfig sc;
    sc.train_size = 1000;
    sc.test_size = 200;
    const auto data = generate_synthetic(sc);
    const auto predictor = pretrain_on(data.train, ExperimentConfig{});
    const std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 4.0, 20.0};
    std::size_t violations = 0;
    for (const auto& inst : data.test.instances) {
      std::size_t previous = inst.num_parts() + 1;
      for (double lambda : grid) {
        LossConfig loss;
        loss.lambda = lambda;
        const ReferenceContext ctx(inst, predictor, loss);
        const auto used = rollout_reference(ctx, PartialView(inst.num_parts())).terminal.size();
        if (used > previous) ++violations;
        previous = used;
      }
    }
    return Verdict{violations == 0, fmt("%g violations over 200 instances", violations)};
  });

  run(3, "forced stop at lambda = n + 1", 0.0, [] {
    SyntheticConfig sc;
    sc.train_size = 1000;
    sc.test_size = 500;
    const auto data = generate_synthetic(sc);
    ExperimentConfig cfg;
    cfg.task_loss = TaskLossKind::zero_one;
    const auto predictor = pretrain_on(data.train, cfg);
    LossConfig loss;
    loss.lambda = static_cast<double>(sc.num_parts + 1);
    loss.task_loss = TaskLossKind::zero_one;
    std::size_t stopped = 0;
    for (const auto& inst : data.test.instances) {
      const ReferenceContext ctx(inst, predictor, loss);
      stopped += reference_action(ctx, PartialView(inst.num_parts())).is_stop() ? 1 : 0;
    }
    const auto row = evaluate(train_bundle(data.train, predictor, loss, cfg), data.test);
    const bool ok = stopped == data.test.size() && row.avg_fraction_parts < 0.05;
    return Verdict{ok, fmt("reference stops at once on %g/%g; learned policy reads %.4f of parts",
                           stopped, data.test.size(), row.avg_fraction_parts)};
  });

  run(4, "greedy reference is optimal on modular losses", 0.0, [] {
    Rng rng(4);
    std::vector<ModularLoss> models;
    for (int m = 0; m < 50; ++m) {
      const std::size_t n = 1 + uniform_below(rng, 6);
      std::vector<double> gains(n);
      double positive = 0.0;
      for (auto& g : gains) {
        g = static_cast<double>(uniform_below(rng, 13)) / 8.0 - 0.5;
        positive += std::max(g, 0.0);
      }
      const double lambda = static_cast<double>(n) * static_cast<double>(2 * uniform_below(rng, 12) + 1) / 16.0;
      models.emplace_back(positive + 0.25, std::move(gains), lambda);
    }
    const double alpha = measure_alpha(models);
    return Verdict{alpha == 1.0, fmt("alpha = %.17g over 50 models", alpha)};
  });

  run(5, "every cost example has minimum 0 and no negative cost", 0.0, [] {
    SyntheticConfig sc;
    sc.train_size = 1000;
    sc.test_size = 1;
    const auto data = generate_synthetic(sc);
    const ExperimentConfig cfg;
    const auto predictor = pretrain_on(data.train, cfg);
    std::size_t total = 0, bad = 0;
    for (double lambda : {0.0, 1.0, 4.0}) {
      LossConfig loss;
      loss.lambda = lambda;
      train(data.train.instances, predictor, data.train.prior, loss, cfg.train,
            [&](const CostExample& ex) {
              ++total;
              const double lowest = *std::min_element(ex.costs.begin(), ex.costs.end());
              const bool negative = std::any_of(ex.costs.begin(), ex.costs.end(),
                                                [](double c) { return c < 0.0; });
              if (lowest != 0.0 || negative) ++bad;
            });
    }
    return Verdict{bad == 0 && total > 0, fmt("%g of %g cost examples violate", bad, total)};
  });

  run(6, "regret audit stays within the bound", 0.0, [] {
    SyntheticConfig sc;
    sc.num_parts = 6;
    sc.train_size = 2000;
    sc.test_size = 100;
    const auto data = generate_synthetic(sc);
    const ExperimentConfig cfg;
    LossConfig loss;
    loss.lambda = 1.0;
    const auto bundle = train_bundle(data.train, pretrain_on(data.train, cfg), loss, cfg);
    const auto r = regret_audit(data.test.instances, bundle);
    const bool ok = r.all_finite() && r.alpha_hat >= 1.0 &&
                    r.empirical_regret <= r.bound + 0.01;
    return Verdict{ok, fmt("regret %.4f, T*delta %.4f, eps_c %.3f, alpha %.4f", r.empirical_regret,
                           r.bound, r.epsilon_c, r.alpha_hat)};
  });

  run(7, "hard instances get more parts at lambda = 1", 0.0, [&] {
    if (def.dynamic.size() != lambdas.size()) return Verdict{false, "default sweep unavailable"};
    const auto& row = def.dynamic[2];
    if (!row.easy_usage || !row.hard_usage) return Verdict{false, "difficulty flags missing"};
    const double ratio = *row.hard_usage / *row.easy_usage;
    return Verdict{ratio >= 1.2, fmt("hard %.3f parts, easy %.3f parts, ratio %.3f", *row.hard_usage,
                                     *row.easy_usage, ratio)};
  });

  run(8, "mechanical properties", 0.0, [] {
    Verdict v{true, ""};
    Rng rng(8);

    // Trajectory bounds.
    std::size_t bad_traj = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const std::size_t k = 2 + uniform_below(rng, 3);
      const std::size_t n = 1 + uniform_below(rng, 10);
      const bool quad = trial % 2 == 0;
      TaskPredictor p(6, k, n);
      for (auto& w : p.weights()) w = 2.0 * uniform_unit(rng) - 1.0;
      Policy policy(n, state_dimension(k, quad));
      for (std::size_t a = 0; a <= n; ++a) {
        for (auto& w : policy.regressor(a == n ? Action::stop() : Action::acquire(a))) {
          w = uniform_unit(rng) - 0.5;
        }
      }
      ModelBundle bundle{p, policy, std::vector<double>(k, 1.0 / static_cast<double>(k)),
                         LossConfig{}, TrainConfig{}};
      bundle.train.quadratic = quad;
      PartedInstance inst;
      inst.label = uniform_below(rng, k);
      inst.parts.resize(n);
      for (auto& bag : inst.parts) {
        bag.push_back({static_cast<std::uint32_t>(uniform_below(rng, 64)), 1.0});
      }
      const auto t = predict(bundle, inst);
      std::vector<bool> seen(n, false);
      bool ok = t.length() <= n + 1 && t.steps.back().action.is_stop();
      for (std::size_t s = 0; s + 1 < t.length() && ok; ++s) {
        const auto part = t.steps[s].action.part();
        ok = !seen[part];
        seen[part] = true;
      }
      bad_traj += ok ? 0 : 1;
    }
    v.pass = v.pass && bad_traj == 0;
    v.detail += fmt("%g bad trajectories in 10000; ", bad_traj);

    // Predictor gradient against central differences.
    double worst_pred = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      TaskPredictor p(6, 3, 4);
      for (auto& w : p.weights()) w = 2.0 * uniform_unit(rng) - 1.0;
      PartialFeatures f;
      f.indicators = {1, 0, 1, 1};
      f.sparse = {{3, 0.7}, {17, -1.2}, {40, 2.0}};
      const std::size_t label = uniform_below(rng, 3);
      for (const auto& [offset, g] : p.gradient(f, label)) {
        const double h = 1e-5;
        const double keep = p.weights()[offset];
        p.weights()[offset] = keep + h;
        const double up = p.loss(f, label);
        p.weights()[offset] = keep - h;
        const double down = p.loss(f, label);
        p.weights()[offset] = keep;
        if (std::abs(g) > 1e-6) worst_pred = std::max(worst_pred, relative_error(g, (up - down) / (2 * h)));
      }
    }
    // Policy regressor gradient against central differences.
    double worst_pol = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Policy policy(3, 7);
      const Action a = Action::acquire(uniform_below(rng, 3));
      for (auto& w : policy.regressor(a)) w = 2.0 * uniform_unit(rng) - 1.0;
      std::vector<double> x(7);
      for (auto& e : x) e = 2.0 * uniform_unit(rng) - 1.0;
      const double target = uniform_unit(rng);
      auto objective = [&] {
        const double r = policy.predicted_cost(a, x) - target;
        return 0.5 * r * r;
      };
      const auto grad = policy.gradient(a, x, target);
      for (std::size_t j = 0; j < grad.size(); ++j) {
        const double h = 1e-5;
        auto w = policy.regressor(a);
        const double keep = w[j];
        w[j] = keep + h;
        const double up = objective();
        w[j] = keep - h;
        const double down = objective();
        w[j] = keep;
        if (std::abs(grad[j]) > 1e-6) {
          worst_pol = std::max(worst_pol, relative_error(grad[j], (up - down) / (2 * h)));
        }
      }
    }
    const bool grads = worst_pred < 1e-4 && worst_pol < 1e-4;
    v.pass = v.pass && grads;
    v.detail += fmt("gradient rel. error predictor %.2e policy %.2e; ", worst_pred, worst_pol);

    // Reproducibility and round trips.
    SyntheticConfig sc;
    sc.train_size = 300;
    sc.test_size = 100;
    const auto data = generate_synthetic(sc);
    const bool same_data = data.train == generate_synthetic(sc).train;
    ExperimentConfig cfg;
    LossConfig loss;
    loss.lambda = 1.0;
    auto build = [&] { return train_bundle(data.train, pretrain_on(data.train, cfg), loss, cfg); };
    const auto first = build();
    const auto bytes = bytes_of(first);
    const bool reproducible = same_data && bytes == bytes_of(build());
    std::istringstream in(bytes);
    const auto loaded = ModelBundle::load(in);
    const bool round_trip = same_model(first, loaded) && bytes_of(loaded) == bytes;
    auto csv = [&] {
      std::ostringstream out;
      const std::vector<double> one{1.0};
      write_pareto_header(out, sc.num_parts, sc.num_classes);
      for (const auto& r : sweep_lambda(data.train, data.test, one, cfg)) write_pareto_row(out, r);
      return out.str();
    };
    const bool csv_same = csv() == csv();
    v.pass = v.pass && reproducible && round_trip && csv_same;
    v.detail += std::string("seeded runs ") + (reproducible && csv_same ? "identical" : "differ") +
                ", bundle round trip " + (round_trip ? "bit-exact" : "differs");
    return v;
  });

  return failures == 0 ? 0 : 1;
}
