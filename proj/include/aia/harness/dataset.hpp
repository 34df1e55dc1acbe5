#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aia/core.hpp"

namespace aia {

/// Instances sharing one class count and one part count.
struct Dataset {
  std::string name;
  std::size_t num_classes = 0;
  std::size_t num_parts = 0;
  std::vector<PartedInstance> instances;
  /// Empirical class frequencies.
  std::vector<double> prior;

  std::size_t size() const { return instances.size(); }

  /// Checks shapes and computes the prior. The class count defaults to
  /// max(label) + 1 (at least 2). Throws std::invalid_argument when empty or
  /// inconsistent.
  static Dataset from_instances(std::string name, std::vector<PartedInstance> instances,
                                std::optional<std::size_t> num_classes = std::nullopt);

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// One JSON object per line:
///   {"id": str, "label": int, "difficulty": "easy"|"hard" (optional),
///    "parts": [[[index, weight], ...], ...]}
/// Throws std::runtime_error naming the line on malformed input.
Dataset read_jsonl(std::istream& in, const std::string& name,
                   std::optional<std::size_t> num_classes = std::nullopt);
Dataset load_jsonl(const std::filesystem::path& path,
                   std::optional<std::size_t> num_classes = std::nullopt);

void write_jsonl(std::ostream& out, const Dataset& dataset);
void save_jsonl(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace aia
