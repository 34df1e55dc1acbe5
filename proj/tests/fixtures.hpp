#pragma once

// Small hand-built instances and predictors shared by the unit tests.

#include <cmath>
#include <cstddef>
#include <vector>

#include "aia/core.hpp"
#include "aia/predictor.hpp"
#include "aia/random.hpp"

namespace aia::testing {

inline PartedInstance make_instance(std::size_t label, std::vector<FeatureBag> parts,
                                    std::string id = "x") {
  PartedInstance inst;
  inst.id = std::move(id);
  inst.label = label;
  inst.parts = std::move(parts);
  return inst;
}

// Part i carries feature i with weight 1; nothing else.
inline PartedInstance one_feature_per_part(std::size_t label, std::size_t n) {
  std::vector<FeatureBag> parts(n);
  for (std::size_t i = 0; i < n; ++i) parts[i] = {{static_cast<std::uint32_t>(i), 1.0}};
  return make_instance(label, std::move(parts));
}

// Random instance with small random bags inside a 2^bits hash space.
inline PartedInstance random_instance(Rng& rng, std::size_t k, std::size_t n, unsigned bits,
                                      std::size_t bag = 3) {
  std::vector<FeatureBag> parts(n);
  for (auto& b : parts) {
    const std::size_t m = uniform_below(rng, bag + 1);
    for (std::size_t j = 0; j < m; ++j) {
      b.push_back({static_cast<std::uint32_t>(uniform_below(rng, std::size_t{1} << bits)),
                   0.5 + uniform_unit(rng)});
    }
  }
  return make_instance(uniform_below(rng, k), std::move(parts));
}

inline void randomize(TaskPredictor& p, Rng& rng, double scale = 1.0) {
  for (auto& w : p.weights()) w = scale * (2.0 * uniform_unit(rng) - 1.0);
}

inline double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

}  // namespace aia::testing
