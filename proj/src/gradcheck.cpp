#include "hagnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace hagnn {

namespace {

double loss_value(const MultiRelationGraph& g, const NeighborList& nb, const ModelState& state,
                  const DatasetSplit& split) {
  NoGradGuard no_grad;
  ForwardResult fr = forward_pass(g, nb, state);
  return class_balanced_loss(fr.probs, split.train_legit, split.train_fraud,
                             state.config.lambda)
      .item();
}

}  // namespace

GradCheckResult gradcheck_model(const MultiRelationGraph& g, const DatasetSplit& split,
                                ModelState& state, double eps) {
  NeighborList nb = NeighborList::from_graph(g);

  ForwardResult fr = forward_pass(g, nb, state);
  Tensor loss =
      class_balanced_loss(fr.probs, split.train_legit, split.train_fraud, state.config.lambda);
  state.zero_grads();
  backward(loss);

  GradCheckResult result;
  for (auto& [name, param] : state.named_params()) {
    const std::vector<double> analytic = param.grad();
    auto& values = param.values_mut();
    for (size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + eps;
      double plus = loss_value(g, nb, state, split);
      values[i] = original - eps;
      double minus = loss_value(g, nb, state, split);
      values[i] = original;

      double numeric = (plus - minus) / (2.0 * eps);
      double denom = std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
      double rel = std::abs(analytic[i] - numeric) / denom;
      result.entries_checked++;
      if (rel > result.worst_rel_err) {
        result.worst_rel_err = rel;
        result.worst_param = name;
        result.worst_index = static_cast<int>(i);
      }
    }
  }
  return result;
}

MultiRelationGraph gradcheck_graph(uint64_t seed) {
  SynthConfig config;
  config.num_nodes = 12;
  config.fraud_fraction = 0.34;
  config.num_relations = 3;
  config.edge_prob = {0.35, 0.25, 0.2};
  config.camouflage_rate = 0.2;
  config.feature_dim = 5;
  config.feature_camouflage_rate = 0.2;
  config.seed = seed;
  return generate_synthetic(config);
}

TrainConfig gradcheck_config(uint64_t seed) {
  TrainConfig config;
  config.seed = seed;
  config.layers = 2;
  config.heads = 2;
  config.head_dim = 3;
  config.relation_hidden = 6;
  config.fusion_hidden = 8;
  config.fusion_att_dim = 6;
  config.embed_dim = 6;
  config.classifier_hidden = 4;
  config.train_fraction = 0.5;
  config.local_proj = "off";
  return config;
}

}  // namespace hagnn
