#pragma once

#include <vector>

#include "hagnn/graph.hpp"
#include "hagnn/tensor.hpp"

namespace hagnn {

// L layers of multi-head attention over the union neighborhood (self
// included). Each head projects its input to head_dim columns and scores
// node pairs with a learned vector over the concatenated projections; the
// score is asymmetric in (i, j).
//
// faithful_dims drops the per-head projections so layer l output has width
// heads^l * input_dim, the literal stacked-concatenation reading; it is
// restricted to layers <= 2 and small graphs.
struct LayerConfig {
  int layers = 2;
  int heads = 8;
  int head_dim = 4;
  Activation score_act = Activation::LeakyRelu;
  Activation aggregate_act = Activation::LeakyRelu;
  bool faithful_dims = false;
};

struct HeadParams {
  Tensor proj;  // d_in x head_dim; undefined in faithful mode
  Tensor attn;  // (2 * width) x 1, first half scores the destination node
};

struct NeighborhoodAttentionParams {
  std::vector<std::vector<HeadParams>> layers;  // [layer][head]
  std::vector<int> input_widths;                // per layer
  int output_width() const;
};

NeighborhoodAttentionParams init_neighborhood_attention(const LayerConfig& config, int input_dim,
                                                        Rng& rng);

// One head on an already-projected input (N x width): attention scores from
// head.attn, aggregation over nb, then the aggregate activation.
Tensor head_attention(const Tensor& projected, const HeadParams& head, const LayerConfig& config,
                      const NeighborList& nb);

Tensor layer_forward(const Tensor& g_prev, const NeighborhoodAttentionParams& params,
                     const LayerConfig& config, const NeighborList& nb, int layer);

Tensor forward(const Tensor& g0, const NeighborhoodAttentionParams& params,
               const LayerConfig& config, const NeighborList& nb);

// ---- direct evaluation (no recording) ----

// Attention coefficients of node i over nb.neighbors(i), in list order.
std::vector<double> attention_coefficients(const std::vector<double>& g_prev, int cols, int node,
                                           const HeadParams& head, const LayerConfig& config,
                                           const NeighborList& nb);

// sigma(sum_j alpha_j * ghat_j) for node i given coefficients in list order.
std::vector<double> aggregate_head(const std::vector<double>& g_prev, int cols, int node,
                                   const std::vector<double>& alpha, const HeadParams& head,
                                   const LayerConfig& config, const NeighborList& nb);

}  // namespace hagnn
