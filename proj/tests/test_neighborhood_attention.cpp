#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hagnn/neighborhood_attention.hpp"

using namespace hagnn;

namespace {

double leaky(double x) { return x > 0 ? x : 0.2 * x; }

MultiRelationGraph line_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  NodeTable nodes;
  nodes.num_nodes = n;
  nodes.feature_dim = 1;
  nodes.features.assign(static_cast<size_t>(n), 0.0);
  nodes.labels.assign(static_cast<size_t>(n), 0);
  return assemble(nodes, {canonicalize_edges(0, "", edges)});
}

Tensor random_input(int n, int d, uint64_t seed, bool grad = false) {
  Rng rng(seed);
  std::vector<double> v(static_cast<size_t>(n) * d);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return Tensor::from_values(n, d, std::move(v), grad);
}

}  // namespace

TEST_CASE("zero attention vector gives uniform coefficients; singleton gives one") {
  MultiRelationGraph g = line_graph(4, {{0, 1}, {0, 2}});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 1;
  cfg.heads = 1;
  cfg.head_dim = 2;
  Rng rng(1);
  auto params = init_neighborhood_attention(cfg, 3, rng);
  auto& head = params.layers[0][0];
  std::fill(head.attn.values_mut().begin(), head.attn.values_mut().end(), 0.0);

  Tensor g0 = random_input(4, 3, 2);
  auto alpha = attention_coefficients(g0.values(), 3, 0, head, cfg, nb);
  REQUIRE(alpha.size() == 3);  // {0, 1, 2}
  for (double a : alpha) CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  auto alpha_iso = attention_coefficients(g0.values(), 3, 3, head, cfg, nb);
  REQUIRE(alpha_iso.size() == 1);
  CHECK(alpha_iso[0] == 1.0);
}

TEST_CASE("attention is asymmetric: alpha_01 != alpha_10 on a random triangle") {
  MultiRelationGraph g = line_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 1;
  cfg.heads = 1;
  cfg.head_dim = 2;
  Rng rng(5);
  auto params = init_neighborhood_attention(cfg, 2, rng);
  const auto& head = params.layers[0][0];

  Tensor g0 = random_input(3, 2, 6);
  auto a0 = attention_coefficients(g0.values(), 2, 0, head, cfg, nb);  // over {0,1,2}
  auto a1 = attention_coefficients(g0.values(), 2, 1, head, cfg, nb);

  // Direct evaluation oracle for alpha_01 and alpha_10 (projection + scores).
  auto project = [&](int node) {
    std::vector<double> out(2, 0.0);
    for (int p = 0; p < 2; ++p)
      for (int c = 0; c < 2; ++c) out[c] += g0.at(node, p) * head.proj.at(p, c);
    return out;
  };
  auto score = [&](int i, int j) {
    auto gi = project(i), gj = project(j);
    double s = 0.0;
    for (int c = 0; c < 2; ++c) s += head.attn.values()[c] * gi[c];
    for (int c = 0; c < 2; ++c) s += head.attn.values()[2 + c] * gj[c];
    return leaky(s);
  };
  auto softmax_at = [&](int i, int target) {
    double mx = -1e300, sum = 0.0;
    std::vector<double> e;
    for (int j = 0; j < 3; ++j) e.push_back(score(i, j));
    for (double x : e) mx = std::max(mx, x);
    for (double& x : e) {
      x = std::exp(x - mx);
      sum += x;
    }
    return e[static_cast<size_t>(target)] / sum;
  };
  CHECK(a0[1] == doctest::Approx(softmax_at(0, 1)).epsilon(1e-12));
  CHECK(a1[0] == doctest::Approx(softmax_at(1, 0)).epsilon(1e-12));
  CHECK(a0[1] != a1[0]);
}

TEST_CASE("aggregate_head is convex: identical projected neighbors pass through") {
  MultiRelationGraph g = line_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 1;
  cfg.heads = 1;
  cfg.head_dim = 2;
  Rng rng(7);
  auto params = init_neighborhood_attention(cfg, 2, rng);
  const auto& head = params.layers[0][0];

  // All rows identical -> all projections identical.
  Tensor g0 = Tensor::from_values(4, 2, {0.3, -0.4, 0.3, -0.4, 0.3, -0.4, 0.3, -0.4});
  std::vector<double> ghat(2, 0.0);
  for (int p = 0; p < 2; ++p)
    for (int c = 0; c < 2; ++c) ghat[c] += g0.at(0, p) * head.proj.at(p, c);

  std::vector<double> alpha = {0.1, 0.5, 0.25, 0.15};
  auto out = aggregate_head(g0.values(), 2, 0, alpha, head, cfg, nb);
  for (int c = 0; c < 2; ++c) CHECK(out[c] == doctest::Approx(leaky(ghat[c])).epsilon(1e-13));
}

TEST_CASE("aggregate_head matches a two-neighbor hand loop") {
  MultiRelationGraph g = line_graph(2, {{0, 1}});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 1;
  cfg.heads = 1;
  cfg.head_dim = 3;
  Rng rng(8);
  auto params = init_neighborhood_attention(cfg, 2, rng);
  const auto& head = params.layers[0][0];
  Tensor g0 = random_input(2, 2, 9);

  auto alpha = attention_coefficients(g0.values(), 2, 0, head, cfg, nb);
  auto out = aggregate_head(g0.values(), 2, 0, alpha, head, cfg, nb);

  auto project = [&](int node) {
    std::vector<double> o(3, 0.0);
    for (int p = 0; p < 2; ++p)
      for (int c = 0; c < 3; ++c) o[c] += g0.at(node, p) * head.proj.at(p, c);
    return o;
  };
  auto g0p = project(0), g1p = project(1);
  for (int c = 0; c < 3; ++c) {
    double agg = alpha[0] * g0p[c] + alpha[1] * g1p[c];
    CHECK(out[static_cast<size_t>(c)] == doctest::Approx(leaky(agg)).epsilon(1e-13));
  }
}

TEST_CASE("layer_forward shape law and reduction to aggregate_head at K=1") {
  MultiRelationGraph g = line_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 1;
  cfg.heads = 1;
  cfg.head_dim = 4;
  Rng rng(10);
  auto params = init_neighborhood_attention(cfg, 3, rng);
  Tensor g0 = random_input(5, 3, 11);
  Tensor out = layer_forward(g0, params, cfg, nb, 0);
  CHECK(out.cols() == 4);
  for (int i = 0; i < 5; ++i) {
    auto alpha = attention_coefficients(g0.values(), 3, i, params.layers[0][0], cfg, nb);
    auto row = aggregate_head(g0.values(), 3, i, alpha, params.layers[0][0], cfg, nb);
    for (int c = 0; c < 4; ++c)
      CHECK(out.at(i, c) == doctest::Approx(row[static_cast<size_t>(c)]).epsilon(1e-12));
  }
}

TEST_CASE("identical head parameters tile the K=1 output") {
  MultiRelationGraph g = line_graph(4, {{0, 1}, {2, 3}, {1, 2}});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 1;
  cfg.heads = 3;
  cfg.head_dim = 2;
  Rng rng(12);
  auto params = init_neighborhood_attention(cfg, 2, rng);
  for (int k = 1; k < 3; ++k) {
    params.layers[0][static_cast<size_t>(k)].proj.values_mut() = params.layers[0][0].proj.values();
    params.layers[0][static_cast<size_t>(k)].attn.values_mut() = params.layers[0][0].attn.values();
  }
  Tensor g0 = random_input(4, 2, 13);
  Tensor out = layer_forward(g0, params, cfg, nb, 0);
  CHECK(out.cols() == 6);
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 2; ++c) {
      CHECK(out.at(i, c) == out.at(i, 2 + c));
      CHECK(out.at(i, c) == out.at(i, 4 + c));
    }
}

TEST_CASE("forward with one layer equals layer_forward; rows are row-stochastic") {
  MultiRelationGraph g = line_graph(6, {{0, 1}, {1, 2}, {3, 4}});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 1;
  cfg.heads = 2;
  cfg.head_dim = 3;
  Rng rng(14);
  auto params = init_neighborhood_attention(cfg, 4, rng);
  Tensor g0 = random_input(6, 4, 15);
  Tensor a = forward(g0, params, cfg, nb);
  Tensor b = layer_forward(g0, params, cfg, nb, 0);
  CHECK(a.values() == b.values());

  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 2; ++k) {
      auto alpha =
          attention_coefficients(g0.values(), 4, i, params.layers[0][static_cast<size_t>(k)], cfg, nb);
      double sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      for (double x : alpha) CHECK(x >= 0.0);
    }
}

TEST_CASE("fully disconnected graph: output depends only on the node's own row") {
  MultiRelationGraph g = line_graph(4, {});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.head_dim = 2;
  Rng rng(16);
  auto params = init_neighborhood_attention(cfg, 3, rng);

  Tensor g0 = random_input(4, 3, 17);
  Tensor out1 = forward(g0, params, cfg, nb);

  auto altered = g0.values();
  for (int j = 0; j < 3; ++j) altered[static_cast<size_t>(1) * 3 + j] += 2.5;  // change node 1
  Tensor g0b = Tensor::from_values(4, 3, altered);
  Tensor out2 = forward(g0b, params, cfg, nb);

  for (int c = 0; c < out1.cols(); ++c) {
    CHECK(out1.at(0, c) == out2.at(0, c));  // bitwise: same operand stream
    CHECK(out1.at(2, c) == out2.at(2, c));
  }
  bool node1_changed = false;
  for (int c = 0; c < out1.cols(); ++c) node1_changed |= out1.at(1, c) != out2.at(1, c);
  CHECK(node1_changed);
}

TEST_CASE("receptive field: a distance-2 edge affects L=2 but not L=1") {
  // Toggling edge (1,2) completes the path 0-1-2. Node 0's one-layer output
  // aggregates fixed inputs over the unchanged set {0,1}, so only the
  // two-layer output can see the new edge (through node 1's layer-1 row).
  MultiRelationGraph base = line_graph(4, {{0, 1}});
  MultiRelationGraph toggled = line_graph(4, {{0, 1}, {1, 2}});
  NeighborList nb_base = NeighborList::from_graph(base);
  NeighborList nb_tog = NeighborList::from_graph(toggled);
  Rng rng(18);
  Tensor g0 = random_input(4, 3, 19);

  LayerConfig cfg1;
  cfg1.layers = 1;
  cfg1.heads = 2;
  cfg1.head_dim = 2;
  Rng rng1(20);
  auto params1 = init_neighborhood_attention(cfg1, 3, rng1);
  Tensor a1 = forward(g0, params1, cfg1, nb_base);
  Tensor b1 = forward(g0, params1, cfg1, nb_tog);
  for (int c = 0; c < a1.cols(); ++c) CHECK(a1.at(0, c) == b1.at(0, c));  // L=1: unchanged

  LayerConfig cfg2 = cfg1;
  cfg2.layers = 2;
  Rng rng2(20);
  auto params2 = init_neighborhood_attention(cfg2, 3, rng2);
  Tensor a2 = forward(g0, params2, cfg2, nb_base);
  Tensor b2 = forward(g0, params2, cfg2, nb_tog);
  bool changed = false;
  for (int c = 0; c < a2.cols(); ++c) changed |= a2.at(0, c) != b2.at(0, c);
  CHECK(changed);
}

TEST_CASE("faithful mode: width law K^l * d0 and literal two-node evaluation") {
  MultiRelationGraph g = line_graph(3, {{0, 1}, {1, 2}});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.head_dim = 99;  // unused in faithful mode
  cfg.faithful_dims = true;
  cfg.aggregate_act = Activation::Tanh;
  Rng rng(21);
  auto params = init_neighborhood_attention(cfg, 3, rng);
  CHECK(params.input_widths == std::vector<int>{3, 6});

  Tensor g0 = random_input(3, 3, 22);
  Tensor out = forward(g0, params, cfg, nb);
  CHECK(out.cols() == 12);  // K^2 * d0

  // Hand evaluation of layer 1, head 0, node 2 (neighbors {1, 2}).
  const auto& head = params.layers[0][0];
  auto score = [&](int i, int j) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += head.attn.values()[static_cast<size_t>(c)] * g0.at(i, c);
    for (int c = 0; c < 3; ++c)
      s += head.attn.values()[static_cast<size_t>(3 + c)] * g0.at(j, c);
    return leaky(s);
  };
  double e1 = score(2, 1), e2 = score(2, 2);
  double mx = std::max(e1, e2);
  double w1 = std::exp(e1 - mx), w2 = std::exp(e2 - mx);
  double a1 = w1 / (w1 + w2), a2 = w2 / (w1 + w2);
  Tensor l1 = layer_forward(g0, params, cfg, nb, 0);
  for (int c = 0; c < 3; ++c) {
    double agg = a1 * g0.at(1, c) + a2 * g0.at(2, c);
    CHECK(l1.at(2, c) == doctest::Approx(std::tanh(agg)).epsilon(1e-12));
  }

  LayerConfig bad = cfg;
  bad.layers = 3;
  Rng rng2(1);
  CHECK_THROWS_AS(init_neighborhood_attention(bad, 3, rng2), ConfigError);
}

TEST_CASE("gradients flow correctly through a two-layer stack") {
  MultiRelationGraph g = line_graph(5, {{0, 1}, {1, 2}, {2, 3}, {0, 4}});
  NeighborList nb = NeighborList::from_graph(g);
  LayerConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.head_dim = 2;
  Rng rng(23);
  auto params = init_neighborhood_attention(cfg, 3, rng);
  Tensor g0 = random_input(5, 3, 24, /*grad=*/true);
  Tensor target = random_input(5, 4, 25);

  auto f = [&] {
    Tensor out = forward(g0, params, cfg, nb);
    return dot(out, target);
  };
  std::vector<Tensor> leaves{g0};
  for (auto& layer : params.layers)
    for (auto& h : layer) {
      leaves.push_back(h.proj);
      leaves.push_back(h.attn);
    }

  Tensor loss = f();
  for (auto& l : leaves) l.zero_grad();
  backward(loss);
  std::vector<std::vector<double>> analytic;
  for (auto& l : leaves) analytic.push_back(l.grad());

  double eps = 1e-5, worst = 0.0;
  for (size_t li = 0; li < leaves.size(); ++li) {
    auto& vals = leaves[li].values_mut();
    for (size_t i = 0; i < vals.size(); ++i) {
      double orig = vals[i];
      vals[i] = orig + eps;
      double plus = f().item();
      vals[i] = orig - eps;
      double minus = f().item();
      vals[i] = orig;
      double numeric = (plus - minus) / (2 * eps);
      double err = std::abs(analytic[li][i] - numeric) /
                   std::max({1.0, std::abs(analytic[li][i]), std::abs(numeric)});
      worst = std::max(worst, err);
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("forward is permutation equivariant") {
  MultiRelationGraph g = line_graph(6, {{0, 1}, {1, 2}, {2, 5}, {3, 4}});
  const int n = 6, d = 3;
  std::vector<int> perm = {4, 2, 0, 5, 1, 3};
  std::vector<std::pair<int, int>> pedges;
  for (auto [u, v] : g.relations[0].edges())
    pedges.emplace_back(perm[static_cast<size_t>(u)], perm[static_cast<size_t>(v)]);
  MultiRelationGraph pg = line_graph(6, pedges);

  NeighborList nb = NeighborList::from_graph(g);
  NeighborList pnb = NeighborList::from_graph(pg);
  LayerConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.head_dim = 2;
  Rng rng(31);
  auto params = init_neighborhood_attention(cfg, d, rng);

  Tensor g0 = random_input(n, d, 32);
  std::vector<double> pvals(static_cast<size_t>(n) * d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c)
      pvals[static_cast<size_t>(perm[static_cast<size_t>(i)]) * d + c] = g0.at(i, c);
  Tensor pg0 = Tensor::from_values(n, d, pvals);

  Tensor out = forward(g0, params, cfg, nb);
  Tensor pout = forward(pg0, params, cfg, pnb);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < out.cols(); ++c)
      CHECK(out.at(i, c) ==
            doctest::Approx(pout.at(perm[static_cast<size_t>(i)], c)).epsilon(1e-12));
}
