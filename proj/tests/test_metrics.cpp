#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hagnn/experiments.hpp"
#include "hagnn/metrics.hpp"

using namespace hagnn;

namespace {

// Exhaustive pair-counting oracle, ties worth one half.
double auc_bruteforce(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  int64_t pairs = 0;
  for (size_t p = 0; p < scores.size(); ++p) {
    if (labels[p] != 1) continue;
    for (size_t n = 0; n < scores.size(); ++n) {
      if (labels[n] != 0) continue;
      ++pairs;
      if (scores[p] > scores[n])
        wins += 1.0;
      else if (scores[p] == scores[n])
        wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

MultiRelationGraph labeled_graph(const std::vector<int>& labels,
                                 const std::vector<std::pair<int, int>>& edges,
                                 std::vector<double> features = {}, int d = 1) {
  NodeTable nodes;
  nodes.num_nodes = static_cast<int>(labels.size());
  nodes.feature_dim = d;
  nodes.labels = labels;
  if (features.empty()) features.assign(labels.size() * static_cast<size_t>(d), 0.0);
  nodes.features = std::move(features);
  return assemble(nodes, {canonicalize_edges(0, "", edges)});
}

}  // namespace

TEST_CASE("auc: separable, frozen example, and all-ties cases") {
  std::vector<double> sep = {0.9, 0.8, 0.2, 0.1};
  std::vector<int> lab = {1, 1, 0, 0};
  CHECK(auc_score(sep, lab) == 1.0);

  std::vector<double> s = {0.9, 0.8, 0.3, 0.1};
  std::vector<int> l = {1, 0, 1, 0};
  CHECK(auc_score(s, l) == 0.75);  // 3 of 4 pairs ordered correctly

  std::vector<double> ties = {0.4, 0.4, 0.4, 0.4};
  CHECK(auc_score(ties, l) == 0.5);

  std::vector<int> degenerate = {1, 1, 1, 1};
  CHECK_THROWS_AS(auc_score(s, degenerate), ConfigError);
}

TEST_CASE("auc equals exhaustive pair counting on 500 random score sets") {
  Rng rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    int n = 5 + static_cast<int>(rng.below(60));
    std::vector<double> scores;
    std::vector<int> labels;
    bool discrete = rng.bernoulli(0.5);  // force ties half the time
    int pos = 0;
    for (int i = 0; i < n; ++i) {
      scores.push_back(discrete ? static_cast<double>(rng.below(5)) * 0.25
                                : rng.uniform(0.0, 1.0));
      int y = rng.bernoulli(0.3) ? 1 : 0;
      pos += y;
      labels.push_back(y);
    }
    if (pos == 0) labels[0] = 1;
    if (pos == n) labels[0] = 0;
    CHECK(auc_score(scores, labels) == auc_bruteforce(scores, labels));
  }
}

TEST_CASE("auc is invariant under strictly monotone transforms") {
  Rng rng(7);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    scores.push_back(static_cast<double>(rng.below(8)) * 0.125);
    labels.push_back(rng.bernoulli(0.4) ? 1 : 0);
  }
  labels[0] = 1;
  labels[1] = 0;
  double base = auc_score(scores, labels);
  std::vector<double> affine = scores, expd = scores;
  for (auto& x : affine) x = 3.0 * x + 11.0;
  for (auto& x : expd) x = std::exp(x);
  CHECK(auc_score(affine, labels) == base);
  CHECK(auc_score(expd, labels) == base);
}

TEST_CASE("auc of negated scores complements to one without ties") {
  Rng rng(9);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) {
    scores.push_back(rng.uniform(0.0, 1.0));
    labels.push_back(i % 3 == 0 ? 1 : 0);
  }
  std::vector<double> neg = scores;
  for (auto& x : neg) x = -x;
  CHECK(auc_score(scores, labels) + auc_score(neg, labels) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("recall at a threshold with confusion-count oracle") {
  std::vector<double> s = {0.9, 0.8, 0.3, 0.1};
  std::vector<int> l = {1, 1, 0, 0};
  CHECK(recall_score(s, l, 0.5) == 1.0);
  CHECK(recall_score(s, l, 0.95) == 0.0);

  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 3 + static_cast<int>(rng.below(30));
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      scores.push_back(rng.uniform(0.0, 1.0));
      labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
    }
    labels[0] = 1;
    double thr = rng.uniform(0.0, 1.0);
    int64_t tp = 0, fn = 0;
    for (int i = 0; i < n; ++i) {
      if (labels[static_cast<size_t>(i)] != 1) continue;
      (scores[static_cast<size_t>(i)] > thr ? tp : fn)++;
    }
    CHECK(recall_score(scores, labels, thr) ==
          static_cast<double>(tp) / static_cast<double>(tp + fn));
  }
}

TEST_CASE("recall is monotone non-increasing in the threshold") {
  Rng rng(13);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    scores.push_back(rng.uniform(0.0, 1.0));
    labels.push_back(i % 4 == 0 ? 1 : 0);
  }
  double prev = 1.1;
  for (double thr : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    double r = recall_score(scores, labels, thr);
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("evaluate_scores fills the confusion counts") {
  std::vector<double> s = {0.9, 0.4, 0.7, 0.2};
  std::vector<int> l = {1, 1, 0, 0};
  MetricReport r = evaluate_scores(s, l, 0.5);
  CHECK(r.tp == 1);
  CHECK(r.fn == 1);
  CHECK(r.fp == 1);
  CHECK(r.tn == 1);
  CHECK(r.recall == 0.5);
}

TEST_CASE("label similarity: one class, a mixed triangle, unlabeled exclusion") {
  auto one_class = labeled_graph({0, 0, 0}, {{0, 1}, {1, 2}});
  CHECK(avg_label_similarity(one_class, 0) == 1.0);

  auto triangle = labeled_graph({1, 1, 0}, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(avg_label_similarity(triangle, 0) == doctest::Approx(1.0 / 3.0));

  auto with_unknown = labeled_graph({1, kLabelUnknown, 1}, {{0, 1}, {0, 2}});
  CHECK(avg_label_similarity(with_unknown, 0) == 1.0);  // only edge (0,2) is eligible

  auto all_unknown = labeled_graph({kLabelUnknown, kLabelUnknown}, {{0, 1}});
  CHECK_THROWS_AS(avg_label_similarity(all_unknown, 0), ConfigError);
}

TEST_CASE("feature similarity: identical features give 1, diverging features 0") {
  auto same = labeled_graph({0, 0}, {{0, 1}}, {1.5, 1.5}, 1);
  CHECK(avg_feature_similarity(same, 0) == 1.0);

  auto far = labeled_graph({0, 0}, {{0, 1}}, {0.0, 1e4}, 1);
  CHECK(avg_feature_similarity(far, 0) < 1e-10);
}

TEST_CASE("feature similarity matches a hand loop in both modes") {
  std::vector<double> feats = {0.0, 0.0, 1.0, 0.5, -1.0, 2.0};  // 3 nodes, d = 2
  auto g = labeled_graph({0, 1, 0}, {{0, 1}, {1, 2}, {0, 2}}, feats, 2);

  double sum_dim = 0.0, sum_raw = 0.0;
  auto edges = g.relations[0].edges();
  for (auto [u, v] : edges) {
    double d2 = 0.0;
    for (int k = 0; k < 2; ++k) {
      double diff = feats[static_cast<size_t>(u) * 2 + k] - feats[static_cast<size_t>(v) * 2 + k];
      d2 += diff * diff;
    }
    sum_dim += std::exp(-d2 / 2.0);
    sum_raw += std::exp(-d2);
  }
  CHECK(avg_feature_similarity(g, 0, FeatureSimilarityMode::DimNormalized) ==
        doctest::Approx(sum_dim / 3.0).epsilon(1e-15));
  CHECK(avg_feature_similarity(g, 0, FeatureSimilarityMode::Raw) ==
        doctest::Approx(sum_raw / (3.0 * 2.0)).epsilon(1e-15));
}

TEST_CASE("similarities are invariant under relabeling and feature translation") {
  SynthConfig cfg;
  cfg.num_nodes = 30;
  cfg.num_relations = 2;
  cfg.edge_prob = {0.2, 0.1};
  cfg.seed = 5;
  MultiRelationGraph g = generate_synthetic(cfg);
  double label_base = avg_label_similarity(g, kUnionRelation);
  double feat_base = avg_feature_similarity(g, kUnionRelation);

  // translate all features by a constant vector
  MultiRelationGraph shifted = g;
  for (int i = 0; i < g.num_nodes; ++i)
    for (int k = 0; k < g.feature_dim; ++k)
      shifted.features[static_cast<size_t>(i) * g.feature_dim + k] += 7.5;
  CHECK(avg_feature_similarity(shifted, kUnionRelation) ==
        doctest::Approx(feat_base).epsilon(1e-12));

  // relabel nodes by the reversal permutation
  const int n = g.num_nodes;
  NodeTable nodes;
  nodes.num_nodes = n;
  nodes.feature_dim = g.feature_dim;
  nodes.features.assign(g.features.size(), 0.0);
  nodes.labels.assign(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int pi = n - 1 - i;
    nodes.labels[static_cast<size_t>(pi)] = g.labels[static_cast<size_t>(i)];
    for (int k = 0; k < g.feature_dim; ++k)
      nodes.features[static_cast<size_t>(pi) * g.feature_dim + k] =
          g.features[static_cast<size_t>(i) * g.feature_dim + k];
  }
  std::vector<RelationEdgeList> lists;
  for (int r = 0; r < g.num_relations(); ++r) {
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.relations[static_cast<size_t>(r)].edges())
      edges.emplace_back(n - 1 - u, n - 1 - v);
    lists.push_back(canonicalize_edges(r, "", std::move(edges)));
  }
  MultiRelationGraph pg = assemble(nodes, lists);
  CHECK(avg_label_similarity(pg, kUnionRelation) == label_base);
  CHECK(avg_feature_similarity(pg, kUnionRelation) ==
        doctest::Approx(feat_base).epsilon(1e-12));
}

TEST_CASE("camouflage report has one row per relation plus the union") {
  SynthConfig cfg;
  cfg.num_nodes = 40;
  cfg.num_relations = 3;
  cfg.edge_prob = {0.2, 0.15, 0.1};
  cfg.seed = 6;
  MultiRelationGraph g = generate_synthetic(cfg);
  auto rows = camouflage_report(g);
  REQUIRE(rows.size() == 4);
  CHECK(rows[3].relation == "ALL");
  CHECK(rows[3].edge_count == g.union_adjacency().edge_count());
  int64_t sum = 0;
  for (int r = 0; r < 3; ++r) {
    CHECK(rows[static_cast<size_t>(r)].edge_count ==
          g.relations[static_cast<size_t>(r)].edge_count());
    sum += rows[static_cast<size_t>(r)].edge_count;
  }
  CHECK(rows[3].edge_count <= sum);  // union deduplicates shared edges
  std::string csv = camouflage_csv(rows);
  CHECK(csv.find("relation,edges,avg_feature_similarity,avg_label_similarity\n") == 0);
}

TEST_CASE("sweep with a single lambda equals one training run") {
  SynthConfig scfg;
  scfg.num_nodes = 40;
  scfg.num_relations = 2;
  scfg.edge_prob = {0.2, 0.1};
  scfg.fraud_density = 2.0;
  scfg.fraud_fraction = 0.25;
  scfg.seed = 3;
  MultiRelationGraph g = generate_synthetic(scfg);
  TrainConfig base;
  base.epochs = 3;
  base.layers = 1;
  base.heads = 2;
  base.head_dim = 2;
  base.relation_hidden = 4;
  base.fusion_hidden = 5;
  base.fusion_att_dim = 4;
  base.embed_dim = 4;
  base.classifier_hidden = 3;
  base.local_proj = "off";

  auto rows = lambda_sweep(g, base, {0.4}, {9});
  REQUIRE(rows.size() == 1);

  TrainConfig solo = base;
  solo.lambda = 0.4;
  solo.seed = 9;
  DatasetSplit split = split_nodes(g, solo.train_fraction, Rng(9).fork("split"));
  ModelState s = init_model(g, solo);
  auto logs = train(g, split, s);
  CHECK(rows[0].auc == logs.back().test_auc);
  CHECK(rows[0].recall == logs.back().test_recall);
}

TEST_CASE("soft property: recall at lambda=1.0 does not beat the sweep best") {
  MultiRelationGraph g = generate_synthetic(benchmark_config(1));
  TrainConfig base;
  base.epochs = 60;
  auto rows = lambda_sweep(g, base, {0.2, 0.4, 0.6, 0.8, 1.0}, {1});
  size_t best = 0;
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].auc > rows[best].auc) best = i;
  WARN_MESSAGE(rows.back().recall <= rows[best].recall + 1e-12,
               "recall at lambda=1.0 (" << rows.back().recall
                                        << ") exceeded the AUC-best lambda's recall ("
                                        << rows[best].recall << ")");
}

TEST_CASE("ablate emits three variant rows per seed with shared splits") {
  SynthConfig scfg;
  scfg.num_nodes = 40;
  scfg.num_relations = 2;
  scfg.edge_prob = {0.2, 0.1};
  scfg.fraud_density = 2.0;
  scfg.fraud_fraction = 0.25;
  scfg.seed = 4;
  MultiRelationGraph g = generate_synthetic(scfg);
  TrainConfig base;
  base.epochs = 2;
  base.layers = 1;
  base.heads = 2;
  base.head_dim = 2;
  base.relation_hidden = 4;
  base.fusion_hidden = 5;
  base.fusion_att_dim = 4;
  base.embed_dim = 4;
  base.classifier_hidden = 3;
  base.local_proj = "off";

  auto rows = ablate(g, base, {1, 2}, /*include_f=*/false, /*jobs=*/2);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].key == "v1");
  CHECK(rows[1].key == "v2");
  CHECK(rows[2].key == "full");
  CHECK(rows[0].seed == 1);
  CHECK(rows[3].seed == 2);

  // split audit: same seed implies the same split hash for every variant
  CHECK(split_nodes(g, base.train_fraction, Rng(1).fork("split")).hash() ==
        split_nodes(g, base.train_fraction, Rng(1).fork("split")).hash());

  auto with_f = ablate(g, base, {1}, /*include_f=*/true, 1);
  REQUIRE(with_f.size() == 4);
  CHECK(with_f[3].key == "f");

  std::string csv = run_rows_csv(rows);
  CHECK(csv.find("variant_or_lambda,auc,recall,seed\n") == 0);
}
