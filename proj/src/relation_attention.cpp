#include "hagnn/relation_attention.hpp"

#include <algorithm>
#include <cmath>

namespace hagnn {

RelationAttentionParams init_relation_attention(int num_nodes, int hidden_dim, Rng& rng) {
  RelationAttentionParams p;
  p.W = xavier_uniform(hidden_dim, num_nodes, num_nodes, hidden_dim, rng);
  p.b = Tensor::zeros(hidden_dim, 1, /*requires_grad=*/true);
  p.q = xavier_uniform(hidden_dim, 1, hidden_dim, 1, rng);
  return p;
}

Tensor relation_logits(const MultiRelationGraph& g, const RelationAttentionParams& params) {
  Tensor wt = transpose(params.W);  // N x hidden, shared across relations
  std::vector<Tensor> logits;
  logits.reserve(static_cast<size_t>(g.num_relations()));
  for (int r = 0; r < g.num_relations(); ++r) {
    Tensor t = sparse_matmul(g.relations[static_cast<size_t>(r)], wt);  // rows = (W a_i^r)^T
    Tensor u = activation(add_rowvec(t, params.b), Activation::Tanh);
    Tensor s = matmul(u, params.q);  // N x 1 of q^T tanh(.)
    logits.push_back(mean_all(s));
  }
  return concat_rows(logits);
}

Tensor relation_weights(const Tensor& logits) {
  std::vector<int> all(static_cast<size_t>(logits.rows()));
  for (int i = 0; i < logits.rows(); ++i) all[static_cast<size_t>(i)] = i;
  return masked_softmax(logits, all);
}

double relation_importance(const MultiRelationGraph& g, int relation,
                           const RelationAttentionParams& params) {
  if (relation < 0 || relation >= g.num_relations())
    throw std::out_of_range("relation index out of range");
  const int n = g.num_nodes;
  const int hidden = params.W.rows();
  const auto& w = params.W.values();
  double total = 0.0;
  std::vector<double> pre(static_cast<size_t>(hidden));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < hidden; ++c) pre[static_cast<size_t>(c)] = params.b.values()[static_cast<size_t>(c)];
    for (int j : g.relations[static_cast<size_t>(relation)].row(i))
      for (int c = 0; c < hidden; ++c)
        pre[static_cast<size_t>(c)] += w[static_cast<size_t>(c) * n + j];
    double s = 0.0;
    for (int c = 0; c < hidden; ++c)
      s += params.q.values()[static_cast<size_t>(c)] * std::tanh(pre[static_cast<size_t>(c)]);
    total += s;
  }
  return total / static_cast<double>(n);
}

std::vector<double> relation_weights(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("relation_weights: empty logits");
  double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<double> local_embedding(const MultiRelationGraph& g, int node,
                                    std::span<const double> beta) {
  if (beta.size() != static_cast<size_t>(g.num_relations()))
    throw std::invalid_argument("local_embedding: beta length must equal relation count");
  if (node < 0 || node >= g.num_nodes) throw std::out_of_range("node index out of range");
  std::vector<double> h(static_cast<size_t>(g.num_nodes), 0.0);
  for (int r = 0; r < g.num_relations(); ++r)
    for (int j : g.relations[static_cast<size_t>(r)].row(node))
      h[static_cast<size_t>(j)] += beta[static_cast<size_t>(r)];
  return h;
}

}  // namespace hagnn
