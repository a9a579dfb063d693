#pragma once

#include <string>

#include "hagnn/graph.hpp"
#include "hagnn/training.hpp"

namespace hagnn {

struct GradCheckResult {
  double worst_rel_err = 0.0;
  std::string worst_param;
  int worst_index = -1;
  size_t entries_checked = 0;

  bool pass(double tolerance = 1e-4) const { return worst_rel_err <= tolerance; }
};

// Central-difference verification of every learnable tensor against the
// recorded backward pass, through the full forward + class-balanced loss.
// Relative error uses max(1, |analytic|, |numeric|) as the denominator.
GradCheckResult gradcheck_model(const MultiRelationGraph& g, const DatasetSplit& split,
                                ModelState& state, double eps = 1e-5);

// Small random instance the `gradcheck` command runs on: 12 nodes,
// 3 relations, both classes labeled.
MultiRelationGraph gradcheck_graph(uint64_t seed);
TrainConfig gradcheck_config(uint64_t seed);

}  // namespace hagnn
