#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aia/engine.hpp"
#include "aia/harness/dataset.hpp"

namespace aia {

/// One operating point of a cost/accuracy trade-off curve.
struct ParetoRow {
  std::string kind;  ///< "dynamic" (param = lambda) or "static" (param = k)
  double param = 0.0;
  std::size_t instances = 0;
  double avg_fraction_parts = 0.0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double mean_loss = 0.0;  ///< mean terminal combined loss
  /// Mean number of parts acquired, by true class.
  std::vector<double> class_usage;
  std::optional<double> easy_usage;
  std::optional<double> hard_usage;
  /// How often each part was acquired.
  std::vector<std::uint64_t> histogram;
  std::uint64_t total_parts = 0;
};

/// Mean of per-class F1 over all `num_classes` classes; a class with no
/// true and no predicted instances, or with zero precision and recall,
/// contributes 0.
double macro_f1(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                std::size_t num_classes);

/// Final outcome of running some acquisition procedure on one instance.
struct Outcome {
  std::size_t predicted = 0;
  PartialView terminal;
  double loss = 0.0;
};

ParetoRow summarize(std::string kind, double param, const Dataset& data,
                    std::span<const Outcome> outcomes);

/// Runs the bundle's learned policy on every instance.
ParetoRow evaluate(const ModelBundle& bundle, const Dataset& data);

/// Forced acquisition of parts 0..k-1 under `predictor`.
ParetoRow evaluate_static(const TaskPredictor& predictor, const Dataset& data, std::size_t k,
                          const LossConfig& loss);

/// kind,param,avg_fraction_parts,accuracy,macro_f1,mean_loss, then n
/// histogram columns, then K per-class usage columns.
void write_pareto_header(std::ostream& out, std::size_t num_parts, std::size_t num_classes);
void write_pareto_row(std::ostream& out, const ParetoRow& row);

}  // namespace aia
