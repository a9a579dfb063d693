#include "hagnn/neighborhood_attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hagnn {

namespace {

double act_value(double x, Activation kind) {
  switch (kind) {
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::LeakyRelu:
      return x > 0.0 ? x : kLeakySlope * x;
    case Activation::Sigmoid:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  return 0.0;
}

// Projected row ghat_j for one head; in faithful mode this is g_prev row j.
std::vector<double> projected_row(const std::vector<double>& g_prev, int cols, int node,
                                  const HeadParams& head, const LayerConfig& config) {
  if (config.faithful_dims) {
    return {g_prev.begin() + static_cast<size_t>(node) * cols,
            g_prev.begin() + static_cast<size_t>(node + 1) * cols};
  }
  const int dh = head.proj.cols();
  std::vector<double> out(static_cast<size_t>(dh), 0.0);
  for (int p = 0; p < cols; ++p) {
    double x = g_prev[static_cast<size_t>(node) * cols + p];
    if (x == 0.0) continue;
    for (int c = 0; c < dh; ++c) out[static_cast<size_t>(c)] += x * head.proj.at(p, c);
  }
  return out;
}

}  // namespace

int NeighborhoodAttentionParams::output_width() const {
  if (layers.empty()) return 0;
  const auto& last = layers.back();
  int w = 0;
  for (const auto& h : last)
    w += h.proj.defined() ? h.proj.cols() : input_widths.back();
  return w;
}

NeighborhoodAttentionParams init_neighborhood_attention(const LayerConfig& config, int input_dim,
                                                        Rng& rng) {
  if (config.layers < 1) throw ConfigError("layer count must be >= 1");
  if (config.heads < 1) throw ConfigError("head count must be >= 1");
  if (config.head_dim < 1) throw ConfigError("head_dim must be >= 1");
  if (config.faithful_dims && config.layers > 2)
    throw ConfigError("faithful_dims supports at most 2 layers");

  NeighborhoodAttentionParams params;
  int d_in = input_dim;
  for (int l = 0; l < config.layers; ++l) {
    params.input_widths.push_back(d_in);
    std::vector<HeadParams> heads;
    for (int k = 0; k < config.heads; ++k) {
      HeadParams h;
      int width = d_in;
      if (!config.faithful_dims) {
        h.proj = xavier_uniform(d_in, config.head_dim, d_in, config.head_dim, rng);
        width = config.head_dim;
      }
      h.attn = xavier_uniform(2 * width, 1, 2 * width, 1, rng);
      heads.push_back(std::move(h));
    }
    params.layers.push_back(std::move(heads));
    d_in = config.faithful_dims ? config.heads * d_in : config.heads * config.head_dim;
  }
  return params;
}

Tensor head_attention(const Tensor& projected, const HeadParams& head, const LayerConfig& config,
                      const NeighborList& nb) {
  const int width = projected.cols();
  if (head.attn.rows() != 2 * width)
    throw std::invalid_argument("head_attention: attention vector width mismatch");
  Tensor a_dst = slice_rows(head.attn, 0, width);
  Tensor a_src = slice_rows(head.attn, width, 2 * width);
  Tensor s_dst = matmul(projected, a_dst);
  Tensor s_src = matmul(projected, a_src);
  Tensor agg = neighbor_attention(projected, s_dst, s_src, nb, config.score_act);
  return activation(agg, config.aggregate_act);
}

Tensor layer_forward(const Tensor& g_prev, const NeighborhoodAttentionParams& params,
                     const LayerConfig& config, const NeighborList& nb, int layer) {
  if (layer < 0 || layer >= static_cast<int>(params.layers.size()))
    throw std::out_of_range("layer index out of range");
  if (g_prev.cols() != params.input_widths[static_cast<size_t>(layer)])
    throw std::invalid_argument("layer_forward: input width mismatch");
  std::vector<Tensor> outs;
  outs.reserve(params.layers[static_cast<size_t>(layer)].size());
  for (const auto& head : params.layers[static_cast<size_t>(layer)]) {
    Tensor projected = config.faithful_dims ? g_prev : matmul(g_prev, head.proj);
    outs.push_back(head_attention(projected, head, config, nb));
  }
  return concat_cols(outs);
}

Tensor forward(const Tensor& g0, const NeighborhoodAttentionParams& params,
               const LayerConfig& config, const NeighborList& nb) {
  Tensor g = g0;
  for (int l = 0; l < static_cast<int>(params.layers.size()); ++l)
    g = layer_forward(g, params, config, nb, l);
  return g;
}

std::vector<double> attention_coefficients(const std::vector<double>& g_prev, int cols, int node,
                                           const HeadParams& head, const LayerConfig& config,
                                           const NeighborList& nb) {
  auto neigh = nb.neighbors(node);
  const auto gi = projected_row(g_prev, cols, node, head, config);
  const int width = static_cast<int>(gi.size());
  if (head.attn.rows() != 2 * width)
    throw std::invalid_argument("attention_coefficients: attention vector width mismatch");
  double sd = 0.0;
  for (int c = 0; c < width; ++c) sd += head.attn.values()[static_cast<size_t>(c)] * gi[static_cast<size_t>(c)];

  std::vector<double> scores(neigh.size());
  for (size_t k = 0; k < neigh.size(); ++k) {
    auto gj = projected_row(g_prev, cols, neigh[k], head, config);
    double ss = 0.0;
    for (int c = 0; c < width; ++c)
      ss += head.attn.values()[static_cast<size_t>(width + c)] * gj[static_cast<size_t>(c)];
    scores[k] = act_value(sd + ss, config.score_act);
  }
  double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (auto& s : scores) {
    s = std::exp(s - mx);
    sum += s;
  }
  for (auto& s : scores) s /= sum;
  return scores;
}

std::vector<double> aggregate_head(const std::vector<double>& g_prev, int cols, int node,
                                   const std::vector<double>& alpha, const HeadParams& head,
                                   const LayerConfig& config, const NeighborList& nb) {
  auto neigh = nb.neighbors(node);
  if (alpha.size() != neigh.size())
    throw std::invalid_argument("aggregate_head: coefficient count mismatch");
  const int width = config.faithful_dims ? cols : head.proj.cols();
  std::vector<double> acc(static_cast<size_t>(width), 0.0);
  for (size_t k = 0; k < neigh.size(); ++k) {
    auto gj = projected_row(g_prev, cols, neigh[k], head, config);
    for (int c = 0; c < width; ++c) acc[static_cast<size_t>(c)] += alpha[k] * gj[static_cast<size_t>(c)];
  }
  for (auto& v : acc) v = act_value(v, config.aggregate_act);
  return acc;
}

}  // namespace hagnn
