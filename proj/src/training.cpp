#include "hagnn/training.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hagnn/metrics.hpp"

namespace hagnn {

namespace {

constexpr char kCheckpointMagic[8] = {'H', 'A', 'G', 'N', 'N', 'C', 'K', 'P'};
constexpr uint32_t kCheckpointVersion = 1;

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

long long to_int(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
}

}  // namespace

Variant parse_variant(const std::string& name) {
  std::string v = lower(name);
  if (v == "full") return Variant::Full;
  if (v == "v1") return Variant::V1;
  if (v == "v2") return Variant::V2;
  if (v == "f") return Variant::F;
  throw ConfigError("unknown variant: " + name + " (expected full, v1, v2 or f)");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Full:
      return "full";
    case Variant::V1:
      return "v1";
    case Variant::V2:
      return "v2";
    case Variant::F:
      return "f";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(lr >= 0.0)) throw ConfigError("lr must be >= 0");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (heads < 1) throw ConfigError("heads must be >= 1");
  if (head_dim < 1) throw ConfigError("head_dim must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("lambda must be in (0,1]");
  if (embed_dim < 1) throw ConfigError("embed_dim must be >= 1");
  if (relation_hidden < 1) throw ConfigError("relation_hidden must be >= 1");
  if (fusion_hidden < 1) throw ConfigError("fusion_hidden must be >= 1");
  if (fusion_att_dim < 1) throw ConfigError("fusion_att_dim must be >= 1");
  if (classifier_hidden < 1) throw ConfigError("classifier_hidden must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must be in (0,1)");
  if (local_proj != "auto" && local_proj != "on" && local_proj != "off")
    throw ConfigError("local_proj must be auto, on or off");
  if (local_proj_dim < 1) throw ConfigError("local_proj_dim must be >= 1");
  if (!(recall_threshold >= 0.0 && recall_threshold <= 1.0))
    throw ConfigError("recall_threshold must be in [0,1]");
  if (faithful_dims && layers > 2) throw ConfigError("faithful_dims supports at most 2 layers");
}

bool TrainConfig::use_local_proj(int num_nodes) const {
  if (faithful_dims) return false;
  if (local_proj == "on") return true;
  if (local_proj == "off") return false;
  return num_nodes > 2000;
}

LayerConfig TrainConfig::layer_config() const {
  LayerConfig lc;
  lc.layers = layers;
  lc.heads = heads;
  lc.head_dim = head_dim;
  lc.score_act = score_act;
  lc.aggregate_act = faithful_dims ? Activation::Tanh : aggregate_act;
  lc.faithful_dims = faithful_dims;
  return lc;
}

std::map<std::string, std::string> TrainConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["epochs"] = std::to_string(epochs);
  m["lr"] = fmt_double(lr);
  m["layers"] = std::to_string(layers);
  m["heads"] = std::to_string(heads);
  m["head_dim"] = std::to_string(head_dim);
  m["lambda"] = fmt_double(lambda);
  m["embed_dim"] = std::to_string(embed_dim);
  m["relation_hidden"] = std::to_string(relation_hidden);
  m["fusion_hidden"] = std::to_string(fusion_hidden);
  m["fusion_att_dim"] = std::to_string(fusion_att_dim);
  m["classifier_hidden"] = std::to_string(classifier_hidden);
  m["seed"] = std::to_string(seed);
  m["variant"] = variant_name(variant);
  m["train_fraction"] = fmt_double(train_fraction);
  m["local_proj"] = local_proj;
  m["local_proj_dim"] = std::to_string(local_proj_dim);
  m["score_act"] = activation_name(score_act);
  m["aggregate_act"] = activation_name(aggregate_act);
  m["faithful_dims"] = faithful_dims ? "true" : "false";
  m["recall_threshold"] = fmt_double(recall_threshold);
  return m;
}

void apply_config_entry(TrainConfig& config, const std::string& key, const std::string& value) {
  if (key == "epochs")
    config.epochs = static_cast<int>(to_int(value, key));
  else if (key == "lr")
    config.lr = to_double(value, key);
  else if (key == "layers")
    config.layers = static_cast<int>(to_int(value, key));
  else if (key == "heads")
    config.heads = static_cast<int>(to_int(value, key));
  else if (key == "head_dim")
    config.head_dim = static_cast<int>(to_int(value, key));
  else if (key == "lambda")
    config.lambda = to_double(value, key);
  else if (key == "embed_dim")
    config.embed_dim = static_cast<int>(to_int(value, key));
  else if (key == "relation_hidden")
    config.relation_hidden = static_cast<int>(to_int(value, key));
  else if (key == "fusion_hidden")
    config.fusion_hidden = static_cast<int>(to_int(value, key));
  else if (key == "fusion_att_dim")
    config.fusion_att_dim = static_cast<int>(to_int(value, key));
  else if (key == "classifier_hidden")
    config.classifier_hidden = static_cast<int>(to_int(value, key));
  else if (key == "seed")
    config.seed = static_cast<uint64_t>(to_int(value, key));
  else if (key == "variant")
    config.variant = parse_variant(value);
  else if (key == "train_fraction")
    config.train_fraction = to_double(value, key);
  else if (key == "local_proj")
    config.local_proj = lower(value);
  else if (key == "local_proj_dim")
    config.local_proj_dim = static_cast<int>(to_int(value, key));
  else if (key == "score_act")
    config.score_act = parse_activation(lower(value));
  else if (key == "aggregate_act")
    config.aggregate_act = parse_activation(lower(value));
  else if (key == "faithful_dims")
    config.faithful_dims = lower(value) == "true" || value == "1";
  else if (key == "recall_threshold")
    config.recall_threshold = to_double(value, key);
  else
    throw ConfigError("unknown config key: " + key);
}

TrainConfig parse_train_config(const std::string& text, TrainConfig base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + " is not key = value");
    auto strip = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      size_t e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + " is not key = value");
    apply_config_entry(base, key, value);
  }
  base.validate();
  return base;
}

// ---- model state ------------------------------------------------------------

std::vector<std::pair<std::string, Tensor>> ModelState::named_params() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("relation.W", rel.W);
  out.emplace_back("relation.b", rel.b);
  out.emplace_back("relation.q", rel.q);
  if (local_proj_w.defined()) out.emplace_back("local_proj.W", local_proj_w);
  for (size_t l = 0; l < neigh.layers.size(); ++l)
    for (size_t k = 0; k < neigh.layers[l].size(); ++k) {
      std::string prefix = "neigh.l" + std::to_string(l) + ".h" + std::to_string(k);
      if (neigh.layers[l][k].proj.defined())
        out.emplace_back(prefix + ".proj", neigh.layers[l][k].proj);
      out.emplace_back(prefix + ".attn", neigh.layers[l][k].attn);
    }
  out.emplace_back("fusion.w1_h", fusion.w1_h);
  out.emplace_back("fusion.b1_h", fusion.b1_h);
  out.emplace_back("fusion.w1_g", fusion.w1_g);
  out.emplace_back("fusion.b1_g", fusion.b1_g);
  out.emplace_back("fusion.w1_f", fusion.w1_f);
  out.emplace_back("fusion.b1_f", fusion.b1_f);
  out.emplace_back("fusion.w2", fusion.w2);
  out.emplace_back("fusion.b2", fusion.b2);
  out.emplace_back("fusion.w_att", fusion.w_att);
  out.emplace_back("fusion.b_att", fusion.b_att);
  out.emplace_back("fusion.p_att", fusion.p_att);
  for (size_t l = 0; l < classifier.mlp.weights.size(); ++l) {
    out.emplace_back("classifier.w" + std::to_string(l), classifier.mlp.weights[l]);
    out.emplace_back("classifier.b" + std::to_string(l), classifier.mlp.biases[l]);
  }
  return out;
}

std::vector<Tensor> ModelState::params() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_params()) out.push_back(t);
  return out;
}

void ModelState::zero_grads() {
  for (auto& t : params()) t.zero_grad();
}

ModelState init_model(int num_nodes, int feature_dim, int num_relations,
                      const TrainConfig& config) {
  config.validate();
  if (num_nodes < 1 || feature_dim < 1 || num_relations < 1)
    throw ConfigError("model dims must be positive");

  ModelState s;
  s.config = config;
  s.num_nodes = num_nodes;
  s.feature_dim = feature_dim;
  s.num_relations = num_relations;

  Rng rng = Rng(config.seed).fork("init");
  s.rel = init_relation_attention(num_nodes, config.relation_hidden, rng);

  const bool proj = config.use_local_proj(num_nodes);
  if (proj)
    s.local_proj_w =
        xavier_uniform(config.local_proj_dim, num_nodes, num_nodes, config.local_proj_dim, rng);

  int h_width = proj ? config.local_proj_dim : num_nodes;
  int attn_input = h_width + (config.variant == Variant::F ? feature_dim : 0);
  s.neigh = init_neighborhood_attention(config.layer_config(), attn_input, rng);

  int g_width = s.neigh.output_width();
  s.fusion = init_fusion(num_nodes, g_width, feature_dim, config.fusion_hidden,
                         config.embed_dim, config.fusion_att_dim, rng);
  s.classifier = init_classifier(config.embed_dim, config.classifier_hidden, rng);
  return s;
}

ModelState init_model(const MultiRelationGraph& g, const TrainConfig& config) {
  return init_model(g.num_nodes, g.feature_dim, g.num_relations(), config);
}

// ---- forward ----------------------------------------------------------------

namespace {

Tensor feature_tensor(const MultiRelationGraph& g) {
  return Tensor::from_values(g.num_nodes, g.feature_dim, g.features);
}

// Long-range embedding g^(L). The first layer is special-cased when the
// local embedding is consumed raw: sum_r beta_r A^r never gets materialized,
// each head projects it directly via relation_mix.
Tensor long_range_embedding(const MultiRelationGraph& g, const NeighborList& nb,
                            const ModelState& state, const Tensor& beta, const Tensor& features) {
  const LayerConfig lc = state.config.layer_config();
  const bool with_features = state.config.variant == Variant::F;
  std::span<const SparseMatrix> rels(g.relations.data(), g.relations.size());

  if (lc.faithful_dims) {
    Tensor h = sparse_mix_dense(beta, rels);
    Tensor g0 = with_features ? concat_cols({h, features}) : h;
    return forward(g0, state.neigh, lc, nb);
  }

  if (state.local_proj_enabled()) {
    Tensor h0 = relation_mix(beta, rels, transpose(state.local_proj_w));
    Tensor g0 = with_features ? concat_cols({h0, features}) : h0;
    return forward(g0, state.neigh, lc, nb);
  }

  const int n = g.num_nodes;
  std::vector<Tensor> head_outs;
  head_outs.reserve(state.neigh.layers[0].size());
  for (const auto& head : state.neigh.layers[0]) {
    Tensor projected;
    if (with_features) {
      Tensor p_struct = slice_rows(head.proj, 0, n);
      Tensor p_feat = slice_rows(head.proj, n, n + g.feature_dim);
      projected = add(relation_mix(beta, rels, p_struct), matmul(features, p_feat));
    } else {
      projected = relation_mix(beta, rels, head.proj);
    }
    head_outs.push_back(head_attention(projected, head, lc, nb));
  }
  Tensor out = concat_cols(head_outs);
  for (int l = 1; l < lc.layers; ++l) out = layer_forward(out, state.neigh, lc, nb, l);
  return out;
}

Tensor local_projection(const MultiRelationGraph& g, const ModelState& state,
                        const Tensor& beta) {
  std::span<const SparseMatrix> rels(g.relations.data(), g.relations.size());
  return project_mixed(beta, rels, state.fusion);
}

}  // namespace

ForwardResult forward_pass(const MultiRelationGraph& g, const NeighborList& nb,
                           const ModelState& state) {
  if (g.num_nodes != state.num_nodes || g.feature_dim != state.feature_dim ||
      g.num_relations() != state.num_relations)
    throw ConfigError("model state does not match graph dimensions");

  ForwardResult res;
  res.beta = relation_weights(relation_logits(g, state.rel));
  Tensor features = feature_tensor(g);

  switch (state.config.variant) {
    case Variant::V1: {
      Tensor mh = local_projection(g, state, res.beta);
      res.probs = predict(mh, state.classifier);
      break;
    }
    case Variant::V2: {
      Tensor gl = long_range_embedding(g, nb, state, res.beta, features);
      Tensor mg = project(gl, state.fusion.w1_g, state.fusion.b1_g, state.fusion);
      res.probs = predict(mg, state.classifier);
      break;
    }
    case Variant::Full:
    case Variant::F: {
      Tensor mh = local_projection(g, state, res.beta);
      Tensor gl = long_range_embedding(g, nb, state, res.beta, features);
      Tensor mg = project(gl, state.fusion.w1_g, state.fusion.b1_g, state.fusion);
      Tensor mf = project(features, state.fusion.w1_f, state.fusion.b1_f, state.fusion);
      res.phi = info_weights(mh, mg, mf, state.fusion);
      Tensor z = fuse(mh, mg, mf, res.phi);
      res.probs = predict(z, state.classifier);
      break;
    }
  }
  return res;
}

// ---- training loop -----------------------------------------------------------

namespace {

double metric_or_nan(const std::function<double()>& f) {
  try {
    return f();
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

struct Snapshot {
  std::vector<std::vector<double>> values;
  AdamState adam;
};

Snapshot take_snapshot(const ModelState& state) {
  Snapshot s;
  for (auto& t : state.params()) s.values.push_back(t.values());
  s.adam = state.adam;
  return s;
}

void restore_snapshot(ModelState& state, const Snapshot& snap) {
  auto params = state.params();
  for (size_t i = 0; i < params.size(); ++i) params[i].values_mut() = snap.values[i];
  state.adam = snap.adam;
}

}  // namespace

std::string epoch_log_header(int num_relations) {
  std::string h = "epoch,loss,train_auc,train_recall,test_auc,test_recall";
  for (int r = 1; r <= num_relations; ++r) h += ",beta_" + std::to_string(r);
  h += ",phi_local,phi_longrange,phi_feature";
  return h;
}

std::string epoch_log_csv(const std::vector<EpochLog>& logs, int num_relations) {
  std::ostringstream out;
  out << epoch_log_header(num_relations) << "\n";
  for (const auto& row : logs) {
    out << row.epoch << "," << fmt_double(row.loss) << "," << fmt_double(row.train_auc) << ","
        << fmt_double(row.train_recall) << "," << fmt_double(row.test_auc) << ","
        << fmt_double(row.test_recall);
    for (double b : row.beta) out << "," << fmt_double(b);
    for (int s = 0; s < 3; ++s) {
      out << ",";
      if (row.has_phi) out << fmt_double(row.phi_mean[static_cast<size_t>(s)]);
    }
    out << "\n";
  }
  return out.str();
}

std::vector<EpochLog> train(const MultiRelationGraph& g, const DatasetSplit& split,
                            ModelState& state, const std::string& checkpoint_path,
                            const std::function<void(const EpochLog&)>& on_epoch) {
  if (split.train_legit.empty() || split.train_fraud.empty())
    throw IngestError("train split must contain both classes");
  NeighborList nb = NeighborList::from_graph(g);
  AdamConfig adam_cfg;
  adam_cfg.lr = state.config.lr;

  auto gather = [](const Tensor& probs, const std::vector<int>& nodes) {
    std::vector<double> s;
    s.reserve(nodes.size());
    for (int i : nodes) s.push_back(probs.values()[static_cast<size_t>(i)]);
    return s;
  };
  auto labels_of = [&g](const std::vector<int>& nodes) {
    std::vector<int> y;
    y.reserve(nodes.size());
    for (int i : nodes) y.push_back(g.labels[static_cast<size_t>(i)]);
    return y;
  };
  const std::vector<int> train_labels = labels_of(split.train_nodes);
  const std::vector<int> test_labels = labels_of(split.test_nodes);

  std::vector<EpochLog> logs;
  Snapshot last_good = take_snapshot(state);
  for (int epoch = 1; epoch <= state.config.epochs; ++epoch) {
    try {
      ForwardResult fr = forward_pass(g, nb, state);
      Tensor loss = class_balanced_loss(fr.probs, split.train_legit, split.train_fraud,
                                        state.config.lambda);
      state.zero_grads();
      backward(loss);
      auto params = state.params();
      adam_step(params, state.adam, adam_cfg);

      // Log the state after the update so the final row matches the saved
      // checkpoint exactly.
      NoGradGuard no_grad;
      ForwardResult ev = forward_pass(g, nb, state);
      Tensor ev_loss = class_balanced_loss(ev.probs, split.train_legit, split.train_fraud,
                                           state.config.lambda);
      EpochLog row;
      row.epoch = epoch;
      row.loss = ev_loss.item();
      auto train_scores = gather(ev.probs, split.train_nodes);
      auto test_scores = gather(ev.probs, split.test_nodes);
      row.train_auc = metric_or_nan([&] { return auc_score(train_scores, train_labels); });
      row.train_recall = metric_or_nan(
          [&] { return recall_score(train_scores, train_labels, state.config.recall_threshold); });
      row.test_auc = metric_or_nan([&] { return auc_score(test_scores, test_labels); });
      row.test_recall = metric_or_nan(
          [&] { return recall_score(test_scores, test_labels, state.config.recall_threshold); });
      row.beta = ev.beta.values();
      if (ev.phi.defined()) {
        row.has_phi = true;
        const int n = ev.phi.rows();
        for (int s = 0; s < 3; ++s) {
          double acc = 0.0;
          for (int i = 0; i < n; ++i) acc += ev.phi.at(i, s);
          row.phi_mean[static_cast<size_t>(s)] = acc / static_cast<double>(n);
        }
      }
      logs.push_back(row);
      if (on_epoch) on_epoch(row);
      last_good = take_snapshot(state);
    } catch (const NumericError& e) {
      restore_snapshot(state, last_good);
      if (!checkpoint_path.empty()) save_checkpoint(state, checkpoint_path);
      throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                         "; last good state retained)");
    }
  }
  if (!checkpoint_path.empty()) save_checkpoint(state, checkpoint_path);
  return logs;
}

// ---- checkpoints ---------------------------------------------------------------

void save_checkpoint(const ModelState& state, const std::string& path) {
  nlohmann::json header;
  header["tool"] = "hagnn";
  header["version"] = kCheckpointVersion;
  header["config"] = state.config.to_map();
  header["num_nodes"] = state.num_nodes;
  header["feature_dim"] = state.feature_dim;
  header["num_relations"] = state.num_relations;
  header["adam_step"] = state.adam.step;
  auto named = state.named_params();
  nlohmann::json params = nlohmann::json::array();
  for (auto& [name, t] : named)
    params.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
  header["params"] = params;
  std::string head = header.dump();

  std::string blob;
  blob.reserve(head.size() + 64);
  blob.append(kCheckpointMagic, sizeof(kCheckpointMagic));
  uint32_t ver = kCheckpointVersion;
  blob.append(reinterpret_cast<const char*>(&ver), sizeof(ver));
  uint64_t hlen = head.size();
  blob.append(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  blob += head;
  auto append_doubles = [&blob](const std::vector<double>& v) {
    blob.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  };
  for (auto& [name, t] : named) append_doubles(t.values());
  const bool have_adam = !state.adam.m.empty();
  for (size_t i = 0; i < named.size(); ++i)
    append_doubles(have_adam ? state.adam.m[i]
                             : std::vector<double>(named[i].second.size(), 0.0));
  for (size_t i = 0; i < named.size(); ++i)
    append_doubles(have_adam ? state.adam.v[i]
                             : std::vector<double>(named[i].second.size(), 0.0));
  write_file(path, blob);
}

ModelState load_checkpoint(const std::string& path) {
  std::string blob;
  try {
    blob = read_file(path);
  } catch (const IoError& e) {
    throw CheckpointError(e.what());
  }
  const size_t fixed = sizeof(kCheckpointMagic) + sizeof(uint32_t) + sizeof(uint64_t);
  if (blob.size() < fixed || std::memcmp(blob.data(), kCheckpointMagic, 8) != 0)
    throw CheckpointError("checkpoint corrupt: bad header in " + path);
  uint32_t ver = 0;
  std::memcpy(&ver, blob.data() + 8, sizeof(ver));
  if (ver != kCheckpointVersion)
    throw CheckpointError("checkpoint corrupt: unsupported version in " + path);
  uint64_t hlen = 0;
  std::memcpy(&hlen, blob.data() + 12, sizeof(hlen));
  if (blob.size() < fixed + hlen) throw CheckpointError("checkpoint corrupt: truncated " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(fixed, hlen));
  } catch (const std::exception&) {
    throw CheckpointError("checkpoint corrupt: bad metadata in " + path);
  }

  ModelState state;
  try {
    TrainConfig config;
    for (auto& [k, v] : header.at("config").items())
      apply_config_entry(config, k, v.get<std::string>());
    config.validate();
    state = init_model(header.at("num_nodes").get<int>(), header.at("feature_dim").get<int>(),
                       header.at("num_relations").get<int>(), config);
    state.adam.step = header.at("adam_step").get<int64_t>();
  } catch (const nlohmann::json::exception&) {
    throw CheckpointError("checkpoint corrupt: bad metadata in " + path);
  }

  auto named = state.named_params();
  const auto& jparams = header.at("params");
  if (jparams.size() != named.size())
    throw CheckpointError("checkpoint corrupt: parameter list mismatch in " + path);
  size_t total = 0;
  for (size_t i = 0; i < named.size(); ++i) {
    if (jparams[i].at("name").get<std::string>() != named[i].first ||
        jparams[i].at("rows").get<int>() != named[i].second.rows() ||
        jparams[i].at("cols").get<int>() != named[i].second.cols())
      throw CheckpointError("checkpoint corrupt: parameter shape mismatch in " + path);
    total += named[i].second.size();
  }
  if (blob.size() != fixed + hlen + 3 * total * sizeof(double))
    throw CheckpointError("checkpoint corrupt: truncated " + path);

  const char* cursor = blob.data() + fixed + hlen;
  auto read_doubles = [&cursor](std::vector<double>& dst) {
    std::memcpy(dst.data(), cursor, dst.size() * sizeof(double));
    cursor += dst.size() * sizeof(double);
  };
  for (auto& [name, t] : named) read_doubles(t.values_mut());
  state.adam.m.clear();
  state.adam.v.clear();
  for (auto& [name, t] : named) {
    std::vector<double> m(t.size());
    read_doubles(m);
    state.adam.m.push_back(std::move(m));
  }
  for (auto& [name, t] : named) {
    std::vector<double> v(t.size());
    read_doubles(v);
    state.adam.v.push_back(std::move(v));
  }
  return state;
}

}  // namespace hagnn
