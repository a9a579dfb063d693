#pragma once

#include <string>
#include <vector>

#include "hagnn/graph.hpp"
#include "hagnn/metrics.hpp"
#include "hagnn/training.hpp"

namespace hagnn {

struct RunRow {
  std::string key;  // variant name or lambda value
  double auc = 0.0;
  double recall = 0.0;
  uint64_t seed = 0;
};

// "variant_or_lambda,auc,recall,seed"
std::string run_rows_csv(const std::vector<RunRow>& rows);

// Trains one model per (variant, seed) on splits shared across variants of
// the same seed and reports final-epoch test metrics. Variant order:
// v1, v2, full (+ f when requested).
std::vector<RunRow> ablate(const MultiRelationGraph& g, const TrainConfig& base,
                           const std::vector<uint64_t>& seeds, bool include_f = false,
                           int jobs = 1);

// One full training run per (lambda, seed), shared seed-wise splits.
std::vector<RunRow> lambda_sweep(const MultiRelationGraph& g, const TrainConfig& base,
                                 const std::vector<double>& lambdas,
                                 const std::vector<uint64_t>& seeds, int jobs = 1);

}  // namespace hagnn
