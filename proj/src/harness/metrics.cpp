#include "aia/harness/metrics.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace aia {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

double macro_f1(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                std::size_t num_classes) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("truth and prediction lists differ in length");
  }
  if (num_classes == 0) throw std::invalid_argument("macro-F1 needs at least one class");
  std::vector<double> tp(num_classes, 0.0), fp(num_classes, 0.0), fn(num_classes, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= num_classes || predicted[i] >= num_classes) {
      throw std::out_of_range("class index out of range in macro-F1");
    }
    if (truth[i] == predicted[i]) {
      tp[truth[i]] += 1.0;
    } else {
      fp[predicted[i]] += 1.0;
      fn[truth[i]] += 1.0;
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double denom = 2.0 * tp[c] + fp[c] + fn[c];
    total += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
  }
  return total / static_cast<double>(num_classes);
}

ParetoRow summarize(std::string kind, double param, const Dataset& data,
                    std::span<const Outcome> outcomes) {
  if (outcomes.size() != data.size()) {
    throw std::invalid_argument("one outcome per instance is required");
  }
  if (outcomes.empty()) throw std::invalid_argument("cannot summarise an empty evaluation");
  ParetoRow row;
  row.kind = std::move(kind);
  row.param = param;
  row.instances = data.size();
  row.histogram.assign(data.num_parts, 0);
  row.class_usage.assign(data.num_classes, 0.0);
  std::vector<double> class_count(data.num_classes, 0.0);
  double easy_parts = 0.0, easy_count = 0.0, hard_parts = 0.0, hard_count = 0.0;
  double fraction = 0.0, correct = 0.0, loss = 0.0;
  std::vector<std::size_t> truth, predicted;
  truth.reserve(outcomes.size());
  predicted.reserve(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& inst = data.instances[i];
    const auto& out = outcomes[i];
    const double used = static_cast<double>(out.terminal.size());
    truth.push_back(inst.label);
    predicted.push_back(out.predicted);
    correct += out.predicted == inst.label ? 1.0 : 0.0;
    fraction += fraction_acquired(out.terminal);
    loss += out.loss;
    for (auto part : out.terminal.observed()) ++row.histogram[part];
    row.total_parts += out.terminal.size();
    row.class_usage[inst.label] += used;
    class_count[inst.label] += 1.0;
    if (inst.difficulty == Difficulty::easy) {
      easy_parts += used;
      easy_count += 1.0;
    } else if (inst.difficulty == Difficulty::hard) {
      hard_parts += used;
      hard_count += 1.0;
    }
  }
  const double count = static_cast<double>(outcomes.size());
  row.avg_fraction_parts = fraction / count;
  row.accuracy = correct / count;
  row.mean_loss = loss / count;
  row.macro_f1 = macro_f1(truth, predicted, data.num_classes);
  for (std::size_t c = 0; c < data.num_classes; ++c) {
    if (class_count[c] > 0.0) row.class_usage[c] /= class_count[c];
  }
  if (easy_count > 0.0) row.easy_usage = easy_parts / easy_count;
  if (hard_count > 0.0) row.hard_usage = hard_parts / hard_count;
  return row;
}

namespace {

void check_dataset_shape(const TaskPredictor& predictor, const Dataset& data) {
  if (data.num_parts != predictor.num_parts() || data.num_classes != predictor.num_classes()) {
    throw std::invalid_argument("dataset '" + data.name + "' (" + std::to_string(data.num_classes) +
                                " classes, " + std::to_string(data.num_parts) +
                                " parts) does not match the model (" +
                                std::to_string(predictor.num_classes()) + " classes, " +
                                std::to_string(predictor.num_parts()) + " parts)");
  }
}

}  // namespace

ParetoRow evaluate(const ModelBundle& bundle, const Dataset& data) {
  check_dataset_shape(bundle.predictor, data);
  std::vector<Outcome> outcomes;
  outcomes.reserve(data.size());
  for (const auto& inst : data.instances) {
    auto traj = predict(bundle, inst);
    const double loss = combined_loss(traj.prediction, inst.label, traj.terminal, bundle.loss);
    outcomes.push_back({traj.prediction.argmax(), std::move(traj.terminal), loss});
  }
  return summarize("dynamic", bundle.loss.lambda, data, outcomes);
}

ParetoRow evaluate_static(const TaskPredictor& predictor, const Dataset& data, std::size_t k,
                          const LossConfig& loss) {
  check_dataset_shape(predictor, data);
  if (k < 1 || k > data.num_parts) {
    throw std::out_of_range("static k=" + std::to_string(k) + " must lie in [1, " +
                            std::to_string(data.num_parts) + "]");
  }
  std::vector<std::size_t> first(k);
  for (std::size_t i = 0; i < k; ++i) first[i] = i;
  const PartialView view(data.num_parts, first);
  std::vector<Outcome> outcomes;
  outcomes.reserve(data.size());
  for (const auto& inst : data.instances) {
    const auto pred = predictor.predict(featurize_partial(inst, view));
    outcomes.push_back({pred.argmax(), view, combined_loss(pred, inst.label, view, loss)});
  }
  return summarize("static", static_cast<double>(k), data, outcomes);
}

void write_pareto_header(std::ostream& out, std::size_t num_parts, std::size_t num_classes) {
  out << "kind,param,avg_fraction_parts,accuracy,macro_f1,mean_loss";
  for (std::size_t i = 0; i < num_parts; ++i) out << ",hist_" << i;
  for (std::size_t c = 0; c < num_classes; ++c) out << ",usage_class_" << c;
  out << '\n';
}

void write_pareto_row(std::ostream& out, const ParetoRow& row) {
  out << row.kind << ',' << fmt(row.param) << ',' << fmt(row.avg_fraction_parts) << ','
      << fmt(row.accuracy) << ',' << fmt(row.macro_f1) << ',' << fmt(row.mean_loss);
  for (auto h : row.histogram) out << ',' << h;
  for (double u : row.class_usage) out << ',' << fmt(u);
  out << '\n';
}

}  // namespace aia
