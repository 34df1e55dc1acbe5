#include "aia/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace aia {

namespace {

PartialView without(const PartialView& view, std::size_t part) {
  std::vector<std::size_t> kept;
  for (auto i : view.observed()) {
    if (i != part) kept.push_back(i);
  }
  return PartialView(view.num_parts(), std::move(kept));
}

/// Largest |task loss change| from one insertion, deletion or substitution.
double max_single_change(const ReferenceContext& ctx, const PartialView& view) {
  const double here = ctx.evaluate(view).task;
  double worst = 0.0;
  auto consider = [&](const PartialView& other) {
    worst = std::max(worst, std::abs(ctx.evaluate(other).task - here));
  };
  for (std::size_t i = 0; i < view.num_parts(); ++i) {
    if (view.contains(i)) {
      const PartialView removed = without(view, i);
      consider(removed);
      for (std::size_t j = 0; j < view.num_parts(); ++j) {
        if (!view.contains(j)) consider(removed.with(j));
      }
    } else {
      consider(view.with(i));
    }
  }
  return worst;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

ModularLoss::ModularLoss(double base, std::vector<double> gains, double lambda)
    : base_(base), gains_(std::move(gains)), lambda_(lambda) {
  if (gains_.empty()) throw std::invalid_argument("a modular loss needs at least one part");
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  double reachable = 0.0;
  for (double g : gains_) reachable += std::max(g, 0.0);
  if (base_ < reachable) {
    throw std::invalid_argument("modular base loss must cover every positive gain");
  }
}

LossTerms ModularLoss::evaluate(const PartialView& view) const {
  double task = base_;
  for (auto i : view.sorted()) task -= gains_[i];
  return {task, fraction_acquired(view)};
}

double measure_alpha(std::span<const PartedInstance> sample, const TaskPredictor& predictor,
                     const LossConfig& loss) {
  double alpha = 1.0;
  for (const auto& instance : sample) {
    check_enumeration_guard(instance.num_parts());
    const ReferenceContext ctx(instance, predictor, loss);
    alpha = std::max(alpha, trajectory_alpha(ctx));
  }
  return alpha;
}

double measure_alpha(std::span<const ModularLoss> models) {
  double alpha = 1.0;
  for (const auto& model : models) alpha = std::max(alpha, trajectory_alpha(model));
  return alpha;
}

bool RegretAuditReport::all_finite() const {
  for (double v : {epsilon_c, alpha_hat, delta_max_hat, q_star_max_hat, per_part_cost, delta_hat,
                   j_policy, j_reference, empirical_regret, bound}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

RegretAuditReport regret_audit(std::span<const PartedInstance> sample,
                               const TaskPredictor& predictor, std::span<const double> prior,
                               bool quadratic, const LossConfig& loss,
                               const SelectionPolicy& policy, const AuditConfig& cfg) {
  if (sample.empty()) throw std::invalid_argument("cannot audit an empty sample");
  const std::size_t n = predictor.num_parts();
  check_enumeration_guard(n);
  RegretAuditReport r;
  r.horizon = n + 1;
  r.slack = cfg.slack;
  std::size_t disagreements = 0;
  for (const auto& instance : sample) {
    check_enumeration_guard(instance.num_parts());
    const ReferenceContext ctx(instance, predictor, loss);
    const Trajectory traj = run_selection(predictor, prior, quadratic, instance, policy);
    for (const auto& step : traj.steps) {
      ++r.states;
      if (reference_action(ctx, step.view) != step.action) ++disagreements;
      const auto q = deviation_losses(ctx, step.view, action_set(step.view));
      r.q_star_max_hat = std::max(r.q_star_max_hat, *std::max_element(q.begin(), q.end()));
      r.delta_max_hat = std::max(r.delta_max_hat, max_single_change(ctx, step.view));
      r.alpha_hat = std::max(r.alpha_hat, reference_suboptimality(ctx, step.view));
    }
    r.alpha_hat = std::max(r.alpha_hat, trajectory_alpha(ctx));
    r.j_policy += ctx.evaluate(traj.terminal).combined(loss.lambda);
    const auto ref = rollout_reference(ctx, PartialView(n));
    r.j_reference += ctx.evaluate(ref.terminal).combined(loss.lambda);
    ++r.instances;
  }
  const double count = static_cast<double>(r.instances);
  r.j_policy /= count;
  r.j_reference /= count;
  r.empirical_regret = r.j_policy - r.j_reference;
  r.epsilon_c = static_cast<double>(disagreements) / static_cast<double>(r.states);
  r.per_part_cost = loss.lambda / static_cast<double>(n);
  const double recovery = r.alpha_hat == 1.0 ? 0.0 : (1.0 - 1.0 / r.alpha_hat) * r.q_star_max_hat;
  r.delta_hat = r.epsilon_c * (r.delta_max_hat + r.per_part_cost + recovery);
  r.bound = static_cast<double>(r.horizon) * r.delta_hat;
  r.bound_satisfied = r.empirical_regret <= r.bound + r.slack;
  return r;
}

RegretAuditReport regret_audit(std::span<const PartedInstance> sample, const ModelBundle& bundle,
                               const AuditConfig& cfg) {
  return regret_audit(sample, bundle.predictor, bundle.prior, bundle.train.quadratic, bundle.loss,
                      learned_selection(bundle.policy), cfg);
}

void write_report(std::ostream& out, const RegretAuditReport& r) {
  out << "instances = " << r.instances << '\n'
      << "states = " << r.states << '\n'
      << "horizon_T = " << r.horizon << '\n'
      << "epsilon_c = " << format_double(r.epsilon_c) << '\n'
      << "alpha_hat = " << format_double(r.alpha_hat) << '\n'
      << "delta_max_hat = " << format_double(r.delta_max_hat) << '\n'
      << "q_star_max_hat = " << format_double(r.q_star_max_hat) << '\n'
      << "per_part_cost = " << format_double(r.per_part_cost) << '\n'
      << "delta_hat = " << format_double(r.delta_hat) << '\n'
      << "j_policy = " << format_double(r.j_policy) << '\n'
      << "j_reference = " << format_double(r.j_reference) << '\n'
      << "empirical_regret = " << format_double(r.empirical_regret) << '\n'
      << "bound_T_delta = " << format_double(r.bound) << '\n'
      << "slack = " << format_double(r.slack) << '\n'
      << "bound_satisfied = " << (r.bound_satisfied ? "true" : "false") << '\n';
}

void write_report_csv_header(std::ostream& out) {
  out << "instances,states,horizon_T,epsilon_c,alpha_hat,delta_max_hat,q_star_max_hat,"
         "per_part_cost,delta_hat,j_policy,j_reference,empirical_regret,bound_T_delta,slack,"
         "bound_satisfied\n";
}

void write_report_csv_row(std::ostream& out, const RegretAuditReport& r) {
  out << r.instances << ',' << r.states << ',' << r.horizon << ',' << format_double(r.epsilon_c)
      << ',' << format_double(r.alpha_hat) << ',' << format_double(r.delta_max_hat) << ','
      << format_double(r.q_star_max_hat) << ',' << format_double(r.per_part_cost) << ','
      << format_double(r.delta_hat) << ',' << format_double(r.j_policy) << ','
      << format_double(r.j_reference) << ',' << format_double(r.empirical_regret) << ','
      << format_double(r.bound) << ',' << format_double(r.slack) << ','
      << (r.bound_satisfied ? 1 : 0) << '\n';
}

}  // namespace aia
