#include "hagnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hagnn {

double auc_score(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("auc_score: scores/labels size mismatch");
  std::vector<size_t> idx(scores.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&scores](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Walk groups of tied scores; each positive beats every negative strictly
  // below it and half-beats negatives tied with it. Counts stay in exact
  // halves so the result matches brute-force pair counting bit for bit.
  double wins = 0.0;
  int64_t pos_total = 0, neg_total = 0, neg_below = 0;
  size_t i = 0;
  while (i < idx.size()) {
    size_t j = i;
    int64_t pos_g = 0, neg_g = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      if (labels[idx[j]] == 1)
        ++pos_g;
      else if (labels[idx[j]] == 0)
        ++neg_g;
      ++j;
    }
    wins += static_cast<double>(pos_g) * static_cast<double>(neg_below) +
            0.5 * static_cast<double>(pos_g) * static_cast<double>(neg_g);
    pos_total += pos_g;
    neg_below += neg_g;
    i = j;
  }
  neg_total = neg_below;
  if (pos_total == 0 || neg_total == 0)
    throw ConfigError("auc_score: needs at least one positive and one negative");
  return wins / (static_cast<double>(pos_total) * static_cast<double>(neg_total));
}

double recall_score(std::span<const double> scores, std::span<const int> labels,
                    double threshold) {
  MetricReport r = evaluate_scores(scores, labels, threshold);
  if (r.tp + r.fn == 0) throw ConfigError("recall_score: no positive instances");
  return r.recall;
}

MetricReport evaluate_scores(std::span<const double> scores, std::span<const int> labels,
                             double threshold) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("evaluate_scores: scores/labels size mismatch");
  MetricReport r;
  r.threshold = threshold;
  for (size_t i = 0; i < scores.size(); ++i) {
    bool predicted = scores[i] > threshold;
    if (labels[i] == 1)
      (predicted ? r.tp : r.fn)++;
    else if (labels[i] == 0)
      (predicted ? r.fp : r.tn)++;
  }
  r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn)
                               : 0.0;
  r.auc = 0.0;
  try {
    r.auc = auc_score(scores, labels);
  } catch (const ConfigError&) {
    r.auc = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

namespace {

std::vector<std::pair<int, int>> relation_edges(const MultiRelationGraph& g, int relation) {
  if (relation == kUnionRelation) return g.union_adjacency().edges();
  if (relation < 0 || relation >= g.num_relations())
    throw std::out_of_range("relation index out of range");
  return g.relations[static_cast<size_t>(relation)].edges();
}

}  // namespace

double avg_label_similarity(const MultiRelationGraph& g, int relation) {
  int64_t eligible = 0, same = 0;
  for (auto [u, v] : relation_edges(g, relation)) {
    int yu = g.labels[static_cast<size_t>(u)];
    int yv = g.labels[static_cast<size_t>(v)];
    if (yu == kLabelUnknown || yv == kLabelUnknown) continue;
    ++eligible;
    if (yu == yv) ++same;
  }
  if (eligible == 0) throw ConfigError("avg_label_similarity: no edges with labeled endpoints");
  return static_cast<double>(same) / static_cast<double>(eligible);
}

double avg_feature_similarity(const MultiRelationGraph& g, int relation,
                              FeatureSimilarityMode mode) {
  auto edges = relation_edges(g, relation);
  if (edges.empty()) throw ConfigError("avg_feature_similarity: relation has no edges");
  const double d = static_cast<double>(g.feature_dim);
  double acc = 0.0;
  for (auto [u, v] : edges) {
    auto xu = g.feature_row(u);
    auto xv = g.feature_row(v);
    double dist2 = 0.0;
    for (int k = 0; k < g.feature_dim; ++k) {
      double diff = xu[static_cast<size_t>(k)] - xv[static_cast<size_t>(k)];
      dist2 += diff * diff;
    }
    acc += std::exp(mode == FeatureSimilarityMode::DimNormalized ? -dist2 / d : -dist2);
  }
  double denom = static_cast<double>(edges.size());
  if (mode == FeatureSimilarityMode::Raw) denom *= d;
  return acc / denom;
}

std::vector<CamouflageRow> camouflage_report(const MultiRelationGraph& g,
                                             FeatureSimilarityMode mode) {
  std::vector<CamouflageRow> rows;
  auto make_row = [&g, mode](const std::string& name, int relation) {
    CamouflageRow row;
    row.relation = name;
    row.edge_count = relation == kUnionRelation
                         ? g.union_adjacency().edge_count()
                         : g.relations[static_cast<size_t>(relation)].edge_count();
    row.feature_similarity =
        row.edge_count > 0 ? avg_feature_similarity(g, relation, mode) : 0.0;
    try {
      row.label_similarity = avg_label_similarity(g, relation);
    } catch (const ConfigError&) {
      row.label_defined = false;
      row.label_similarity = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
  };
  for (int r = 0; r < g.num_relations(); ++r)
    rows.push_back(make_row(g.relation_names[static_cast<size_t>(r)], r));
  rows.push_back(make_row("ALL", kUnionRelation));
  return rows;
}

std::string camouflage_csv(const std::vector<CamouflageRow>& rows) {
  std::ostringstream out;
  out << "relation,edges,avg_feature_similarity,avg_label_similarity\n";
  for (const auto& row : rows) {
    out << row.relation << "," << row.edge_count << "," << fmt_double(row.feature_similarity)
        << ",";
    if (row.label_defined) out << fmt_double(row.label_similarity);
    out << "\n";
  }
  return out.str();
}

}  // namespace hagnn
