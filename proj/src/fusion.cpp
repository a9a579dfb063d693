#include "hagnn/fusion.hpp"

namespace hagnn {

MlpParams init_mlp(const std::vector<int>& widths, Rng& rng) {
  if (widths.size() < 2) throw ConfigError("mlp needs at least input and output widths");
  MlpParams p;
  for (size_t l = 0; l + 1 < widths.size(); ++l) {
    p.weights.push_back(xavier_uniform(widths[l + 1], widths[l], widths[l], widths[l + 1], rng));
    p.biases.push_back(Tensor::zeros(widths[l + 1], 1, /*requires_grad=*/true));
  }
  return p;
}

Tensor mlp_forward(const Tensor& x, const MlpParams& p, Activation hidden_act) {
  Tensor h = x;
  for (size_t l = 0; l < p.weights.size(); ++l) {
    h = linear(h, p.weights[l], p.biases[l]);
    if (l + 1 < p.weights.size()) h = activation(h, hidden_act);
  }
  return h;
}

FusionParams init_fusion(int h_width, int g_width, int f_width, int hidden, int embed,
                         int att_dim, Rng& rng) {
  FusionParams p;
  p.w1_h = xavier_uniform(hidden, h_width, h_width, hidden, rng);
  p.b1_h = Tensor::zeros(hidden, 1, true);
  p.w1_g = xavier_uniform(hidden, g_width, g_width, hidden, rng);
  p.b1_g = Tensor::zeros(hidden, 1, true);
  p.w1_f = xavier_uniform(hidden, f_width, f_width, hidden, rng);
  p.b1_f = Tensor::zeros(hidden, 1, true);
  p.w2 = xavier_uniform(embed, hidden, hidden, embed, rng);
  p.b2 = Tensor::zeros(embed, 1, true);
  p.w_att = xavier_uniform(att_dim, embed, embed, att_dim, rng);
  p.b_att = Tensor::zeros(att_dim, 1, true);
  p.p_att = xavier_uniform(att_dim, 1, att_dim, 1, rng);
  return p;
}

Tensor project(const Tensor& e, const Tensor& w1, const Tensor& b1, const FusionParams& p) {
  Tensor z1 = activation(linear(e, w1, b1), p.act);
  return linear(z1, p.w2, p.b2);
}

Tensor project_mixed(const Tensor& beta, std::span<const SparseMatrix> relations,
                     const FusionParams& p) {
  Tensor first = add_rowvec(relation_mix(beta, relations, transpose(p.w1_h)), p.b1_h);
  return linear(activation(first, p.act), p.w2, p.b2);
}

Tensor info_logits(const Tensor& projected, const FusionParams& p) {
  Tensor e = activation(linear(projected, p.w_att, p.b_att), Activation::Tanh);
  return matmul(e, p.p_att);
}

Tensor info_weights(const Tensor& mh, const Tensor& mg, const Tensor& mf,
                    const FusionParams& p) {
  Tensor eta = concat_cols({info_logits(mh, p), info_logits(mg, p), info_logits(mf, p)});
  return softmax_rows(eta);
}

Tensor fuse(const Tensor& mh, const Tensor& mg, const Tensor& mf, const Tensor& phi) {
  if (phi.cols() != 3) throw std::invalid_argument("fuse: phi must have 3 columns");
  Tensor z = scale_rows(mh, slice_col(phi, 0));
  z = add(z, scale_rows(mg, slice_col(phi, 1)));
  return add(z, scale_rows(mf, slice_col(phi, 2)));
}

ClassifierParams init_classifier(int embed, int hidden, Rng& rng) {
  ClassifierParams p;
  p.mlp = init_mlp({embed, hidden, 1}, rng);
  return p;
}

Tensor predict(const Tensor& z, const ClassifierParams& p) {
  return activation(mlp_forward(z, p.mlp, p.act), Activation::Sigmoid);
}

}  // namespace hagnn
