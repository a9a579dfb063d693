#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hagnn/fusion.hpp"
#include "hagnn/graph.hpp"
#include "hagnn/neighborhood_attention.hpp"
#include "hagnn/relation_attention.hpp"
#include "hagnn/tensor.hpp"

namespace hagnn {

enum class Variant { Full, V1, V2, F };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct TrainConfig {
  int epochs = 15;
  double lr = 5e-3;
  int layers = 2;             // L
  int heads = 8;              // K
  int head_dim = 4;           // per-head width; heads * head_dim is the attention width
  double lambda = 0.4;        // legit-class loss weight
  int embed_dim = 32;         // final node embedding width
  int relation_hidden = 64;   // hidden width of the relation scoring transform
  int fusion_hidden = 64;     // projection MLP hidden width
  int fusion_att_dim = 32;    // information-attention hidden width
  int classifier_hidden = 16;
  uint64_t seed = 1;
  Variant variant = Variant::Full;
  double train_fraction = 0.4;
  std::string local_proj = "auto";  // auto | on | off; auto: on when N > 2000
  int local_proj_dim = 64;
  Activation score_act = Activation::LeakyRelu;
  Activation aggregate_act = Activation::LeakyRelu;
  bool faithful_dims = false;
  double recall_threshold = 0.5;

  void validate() const;
  bool use_local_proj(int num_nodes) const;
  LayerConfig layer_config() const;
  std::map<std::string, std::string> to_map() const;
};

// "key = value" lines, '#' comments. Unknown keys are errors.
TrainConfig parse_train_config(const std::string& text, TrainConfig base = {});
void apply_config_entry(TrainConfig& config, const std::string& key, const std::string& value);

struct ModelState {
  TrainConfig config;
  int num_nodes = 0;
  int feature_dim = 0;
  int num_relations = 0;

  RelationAttentionParams rel;
  Tensor local_proj_w;  // local_proj_dim x N when enabled
  NeighborhoodAttentionParams neigh;
  FusionParams fusion;
  ClassifierParams classifier;
  AdamState adam;

  bool local_proj_enabled() const { return local_proj_w.defined(); }
  // Declaration order; stable names used by checkpoints and gradcheck.
  std::vector<std::pair<std::string, Tensor>> named_params() const;
  std::vector<Tensor> params() const;
  void zero_grads();
};

ModelState init_model(int num_nodes, int feature_dim, int num_relations,
                      const TrainConfig& config);
ModelState init_model(const MultiRelationGraph& g, const TrainConfig& config);

struct ForwardResult {
  Tensor probs;  // N x 1
  Tensor beta;   // R x 1
  Tensor phi;    // N x 3 for Full/F, undefined otherwise
};

ForwardResult forward_pass(const MultiRelationGraph& g, const NeighborList& nb,
                           const ModelState& state);

struct EpochLog {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double train_auc = 0.0, train_recall = 0.0;
  double test_auc = 0.0, test_recall = 0.0;
  std::vector<double> beta;
  std::array<double, 3> phi_mean = {0.0, 0.0, 0.0};
  bool has_phi = false;
};

std::string epoch_log_header(int num_relations);
std::string epoch_log_csv(const std::vector<EpochLog>& logs, int num_relations);

// Full-batch epochs: forward -> class-balanced loss on train labels ->
// backward -> Adam step; each row reflects the state after that epoch's
// update. On a numeric error the last completed epoch's parameters are
// restored (and checkpointed when a path is given) before rethrowing.
std::vector<EpochLog> train(const MultiRelationGraph& g, const DatasetSplit& split,
                            ModelState& state, const std::string& checkpoint_path = "",
                            const std::function<void(const EpochLog&)>& on_epoch = {});

void save_checkpoint(const ModelState& state, const std::string& path);
ModelState load_checkpoint(const std::string& path);

}  // namespace hagnn
