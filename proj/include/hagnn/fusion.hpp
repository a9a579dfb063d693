#pragma once

#include <span>
#include <vector>

#include "hagnn/graph.hpp"
#include "hagnn/tensor.hpp"

namespace hagnn {

struct MlpParams {
  std::vector<Tensor> weights;  // layer o: d_out x d_in
  std::vector<Tensor> biases;   // layer o: d_out x 1
};

// widths = {in, hidden..., out}; Xavier weights, zero biases.
MlpParams init_mlp(const std::vector<int>& widths, Rng& rng);

// Hidden layers activated, output layer linear.
Tensor mlp_forward(const Tensor& x, const MlpParams& p, Activation hidden_act);

// Information fusion: per-source projection MLPs into a common embedding
// space (first layer per source since widths differ, later layers shared),
// then information-level attention with shared W', b', p.
struct FusionParams {
  Tensor w1_h, b1_h;  // local-structure source, hidden x N
  Tensor w1_g, b1_g;  // long-range source, hidden x g_width
  Tensor w1_f, b1_f;  // original-feature source, hidden x d
  Tensor w2, b2;      // shared second layer, embed x hidden
  Tensor w_att;       // att_dim x embed
  Tensor b_att;       // att_dim x 1
  Tensor p_att;       // att_dim x 1
  Activation act = Activation::LeakyRelu;
};

FusionParams init_fusion(int h_width, int g_width, int f_width, int hidden, int embed,
                         int att_dim, Rng& rng);

// M(e) for a dense source (rows are nodes).
Tensor project(const Tensor& e, const Tensor& w1, const Tensor& b1, const FusionParams& p);
// M(h) without materializing the N x N local-embedding matrix:
// first layer computed as sum_r beta_r A^r W1^T.
Tensor project_mixed(const Tensor& beta, std::span<const SparseMatrix> relations,
                     const FusionParams& p);

// eta(e) = p^T tanh(W' M(e) + b') per node; N x 1.
Tensor info_logits(const Tensor& projected, const FusionParams& p);
// softmax over the three sources per node; N x 3 (order: h, g, f).
Tensor info_weights(const Tensor& mh, const Tensor& mg, const Tensor& mf, const FusionParams& p);
// z = phi_h M(h) + phi_g M(g) + phi_f M(f); phi is N x 3.
Tensor fuse(const Tensor& mh, const Tensor& mg, const Tensor& mf, const Tensor& phi);

struct ClassifierParams {
  MlpParams mlp;  // embed -> hidden -> 1
  Activation act = Activation::LeakyRelu;
};

ClassifierParams init_classifier(int embed, int hidden, Rng& rng);

// sigmoid(MLP(z)); N x 1 fraud probabilities.
Tensor predict(const Tensor& z, const ClassifierParams& p);

}  // namespace hagnn
