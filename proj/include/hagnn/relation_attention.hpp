#pragma once

#include <span>
#include <vector>

#include "hagnn/graph.hpp"
#include "hagnn/tensor.hpp"

namespace hagnn {

// Relation-level attention: scores each relation from its adjacency rows and
// mixes the rows into a local structural embedding per node. W, b, q are
// shared across all relations.
struct RelationAttentionParams {
  Tensor W;  // hidden x N
  Tensor b;  // hidden x 1
  Tensor q;  // hidden x 1
};

RelationAttentionParams init_relation_attention(int num_nodes, int hidden_dim, Rng& rng);

// ---- recorded (trainable) path ----

// R x 1 tensor of raw relation importances:
//   w_r = (1/N) sum_i q^T tanh(W a_i^r + b)
Tensor relation_logits(const MultiRelationGraph& g, const RelationAttentionParams& params);

// softmax over the full logit vector.
Tensor relation_weights(const Tensor& logits);

// ---- direct evaluation (no recording) ----

double relation_importance(const MultiRelationGraph& g, int relation,
                           const RelationAttentionParams& params);

std::vector<double> relation_weights(const std::vector<double>& logits);

// Dense h_i = sum_r beta_r * a_i^r.
std::vector<double> local_embedding(const MultiRelationGraph& g, int node,
                                    std::span<const double> beta);

}  // namespace hagnn
