#pragma once

#include <span>
#include <string>
#include <vector>

#include "hagnn/graph.hpp"

namespace hagnn {

struct MetricReport {
  double auc = 0.0;
  double recall = 0.0;
  double threshold = 0.5;
  int64_t tp = 0, fn = 0, fp = 0, tn = 0;
};

// Probability a random positive outranks a random negative, ties 0.5.
// Throws ConfigError when either class is absent.
double auc_score(std::span<const double> scores, std::span<const int> labels);

// Fraud-class recall at the threshold (score > threshold counts positive).
double recall_score(std::span<const double> scores, std::span<const int> labels,
                    double threshold = 0.5);

MetricReport evaluate_scores(std::span<const double> scores, std::span<const int> labels,
                             double threshold = 0.5);

constexpr int kUnionRelation = -1;

// Fraction of edges whose endpoints share a label; edges with an unlabeled
// endpoint are excluded. Throws ConfigError when no eligible edge exists.
double avg_label_similarity(const MultiRelationGraph& g, int relation = kUnionRelation);

enum class FeatureSimilarityMode {
  DimNormalized,  // mean over edges of exp(-||x_u - x_v||^2 / d)
  Raw,            // sum over edges of exp(-||x_u - x_v||^2) / (|E| * d)
};

double avg_feature_similarity(const MultiRelationGraph& g, int relation = kUnionRelation,
                              FeatureSimilarityMode mode = FeatureSimilarityMode::DimNormalized);

struct CamouflageRow {
  std::string relation;
  int64_t edge_count = 0;
  double feature_similarity = 0.0;
  double label_similarity = 0.0;
  bool label_defined = true;  // false when no edge has two labeled endpoints
};

// One row per relation plus the deduplicated union ("ALL").
std::vector<CamouflageRow> camouflage_report(
    const MultiRelationGraph& g, FeatureSimilarityMode mode = FeatureSimilarityMode::DimNormalized);

std::string camouflage_csv(const std::vector<CamouflageRow>& rows);

}  // namespace hagnn
