#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hagnn/experiments.hpp"
#include "hagnn/gradcheck.hpp"
#include "hagnn/metrics.hpp"
#include "hagnn/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "hagnn 0.1.0";

std::vector<double> parse_double_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (cur.empty()) continue;
      try {
        size_t pos = 0;
        out.push_back(std::stod(cur, &pos));
        if (pos != cur.size()) throw std::invalid_argument(cur);
      } catch (const std::exception&) {
        throw hagnn::ConfigError("bad value in " + flag + ": '" + cur + "'");
      }
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (out.empty()) throw hagnn::ConfigError(flag + " must not be empty");
  return out;
}

std::vector<uint64_t> parse_seed_list(const std::string& s) {
  std::vector<uint64_t> out;
  for (double v : parse_double_list(s, "--seeds")) {
    if (v < 0 || v != std::floor(v)) throw hagnn::ConfigError("seeds must be non-negative integers");
    out.push_back(static_cast<uint64_t>(v));
  }
  return out;
}

json dataset_digests(const std::string& data_dir) {
  json inputs = json::object();
  fs::path dir(data_dir);
  std::string nodes = (dir / "nodes.csv").string();
  inputs[nodes] = hagnn::file_digest_hex(nodes);
  for (const auto& name : hagnn::list_edge_files(data_dir)) {
    std::string p = (dir / name).string();
    inputs[p] = hagnn::file_digest_hex(p);
  }
  return inputs;
}

// Written into the output directory before any computation starts.
void write_manifest(const std::string& out_dir, const std::string& command, uint64_t seed,
                    const json& config, const json& inputs, const json& notes = json::object()) {
  fs::create_directories(out_dir);
  json m;
  m["tool"] = kToolVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["output_dir"] = out_dir;
  m["config"] = config;
  m["inputs"] = inputs;
  if (!notes.empty()) m["notes"] = notes;
  hagnn::write_file((fs::path(out_dir) / "run_manifest.json").string(), m.dump(2) + "\n");
}

json synth_config_json(const hagnn::SynthConfig& c) {
  json j;
  j["num_nodes"] = c.num_nodes;
  j["fraud_fraction"] = c.fraud_fraction;
  j["num_relations"] = c.num_relations;
  j["edge_prob"] = c.edge_prob;
  j["fraud_density"] = c.fraud_density;
  j["camouflage_rate"] = c.camouflage_rate;
  j["feature_dim"] = c.feature_dim;
  j["feature_camouflage_rate"] = c.feature_camouflage_rate;
  j["feature_shift"] = c.feature_shift;
  j["seed"] = c.seed;
  return j;
}

struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> sets;

  hagnn::TrainConfig resolve() const {
    hagnn::TrainConfig config;
    if (!config_path.empty())
      config = hagnn::parse_train_config(hagnn::read_file(config_path), config);
    for (const auto& kv : sets) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw hagnn::ConfigError("--set expects key=value, got '" + kv + "'");
      hagnn::apply_config_entry(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    config.validate();
    return config;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--set", sets, "override a config key, e.g. --set epochs=50")
        ->take_all();
  }
};

int cmd_synth(const hagnn::SynthConfig& config, const std::string& out) {
  config.validate();
  write_manifest(out, "synth", config.seed, synth_config_json(config), json::object());
  hagnn::MultiRelationGraph g = hagnn::generate_synthetic(config);
  hagnn::write_graph_csv(g, out);
  hagnn::write_file((fs::path(out) / "synth_meta.json").string(),
                    synth_config_json(config).dump(2) + "\n");
  std::cout << "wrote " << g.num_nodes << " nodes, " << g.num_relations()
            << " relations to " << out << "\n";
  return 0;
}

int cmd_stats(const std::string& data, const std::string& out, const std::string& mode) {
  hagnn::FeatureSimilarityMode sim_mode;
  if (mode == "dim")
    sim_mode = hagnn::FeatureSimilarityMode::DimNormalized;
  else if (mode == "raw")
    sim_mode = hagnn::FeatureSimilarityMode::Raw;
  else
    throw hagnn::ConfigError("--feature-sim must be dim or raw");
  write_manifest(out, "stats", 0, json{{"feature_sim", mode}}, dataset_digests(data));
  hagnn::MultiRelationGraph g = hagnn::load_graph_csv(data);
  auto rows = hagnn::camouflage_report(g, sim_mode);
  std::string csv = hagnn::camouflage_csv(rows);
  hagnn::write_file((fs::path(out) / "camouflage_report.csv").string(), csv);
  std::cout << csv;
  return 0;
}

int cmd_train(const hagnn::TrainConfig& config, const std::string& data, const std::string& out) {
  hagnn::MultiRelationGraph g = hagnn::load_graph_csv(data);
  json notes;
  notes["local_proj_active"] = config.use_local_proj(g.num_nodes);
  write_manifest(out, "train", config.seed, config.to_map(), dataset_digests(data), notes);

  hagnn::DatasetSplit split =
      hagnn::split_nodes(g, config.train_fraction, hagnn::Rng(config.seed).fork("split"));
  hagnn::ModelState state = hagnn::init_model(g, config);
  std::string model_path = (fs::path(out) / "model.hagnn").string();
  std::string log_path = (fs::path(out) / "train_log.csv").string();

  std::vector<hagnn::EpochLog> logs;
  auto flush_logs = [&] {
    hagnn::write_file(log_path, hagnn::epoch_log_csv(logs, g.num_relations()));
  };
  try {
    hagnn::train(g, split, state, model_path, [&](const hagnn::EpochLog& row) {
      logs.push_back(row);
      std::cout << "epoch " << row.epoch << " loss " << hagnn::fmt_double(row.loss)
                << " train_auc " << hagnn::fmt_double(row.train_auc) << " test_auc "
                << hagnn::fmt_double(row.test_auc) << "\n";
    });
  } catch (const hagnn::NumericError&) {
    flush_logs();
    throw;
  }
  flush_logs();
  std::cout << "model written to " << model_path << "\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data, const std::string& out) {
  json inputs = dataset_digests(data);
  inputs[model_path] = hagnn::file_digest_hex(model_path);
  hagnn::ModelState state = hagnn::load_checkpoint(model_path);
  write_manifest(out, "eval", state.config.seed, state.config.to_map(), inputs);

  hagnn::MultiRelationGraph g = hagnn::load_graph_csv(data);
  hagnn::DatasetSplit split = hagnn::split_nodes(g, state.config.train_fraction,
                                                 hagnn::Rng(state.config.seed).fork("split"));
  hagnn::NeighborList nb = hagnn::NeighborList::from_graph(g);
  hagnn::NoGradGuard no_grad;
  hagnn::ForwardResult fr = hagnn::forward_pass(g, nb, state);

  std::ostringstream csv;
  csv << "split,auc,recall,threshold,tp,fn,fp,tn\n";
  auto emit = [&](const std::string& name, const std::vector<int>& nodes) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i : nodes) {
      scores.push_back(fr.probs.values()[static_cast<size_t>(i)]);
      labels.push_back(g.labels[static_cast<size_t>(i)]);
    }
    hagnn::MetricReport r =
        hagnn::evaluate_scores(scores, labels, state.config.recall_threshold);
    csv << name << "," << hagnn::fmt_double(r.auc) << "," << hagnn::fmt_double(r.recall) << ","
        << hagnn::fmt_double(r.threshold) << "," << r.tp << "," << r.fn << "," << r.fp << ","
        << r.tn << "\n";
  };
  emit("train", split.train_nodes);
  emit("test", split.test_nodes);
  hagnn::write_file((fs::path(out) / "metrics.csv").string(), csv.str());
  std::cout << csv.str();
  return 0;
}

int cmd_ablate(const hagnn::TrainConfig& config, const std::string& data, const std::string& out,
               const std::vector<uint64_t>& seeds, bool include_f, int jobs) {
  write_manifest(out, "ablate", seeds.front(), config.to_map(), dataset_digests(data),
                 json{{"seeds", seeds}, {"include_f", include_f}});
  hagnn::MultiRelationGraph g = hagnn::load_graph_csv(data);
  auto rows = hagnn::ablate(g, config, seeds, include_f, jobs);
  std::string csv = hagnn::run_rows_csv(rows);
  hagnn::write_file((fs::path(out) / "ablation.csv").string(), csv);
  std::cout << csv;
  return 0;
}

int cmd_sweep(const hagnn::TrainConfig& config, const std::string& data, const std::string& out,
              const std::vector<double>& lambdas, const std::vector<uint64_t>& seeds, int jobs) {
  write_manifest(out, "sweep", seeds.front(), config.to_map(), dataset_digests(data),
                 json{{"seeds", seeds}, {"lambdas", lambdas}});
  hagnn::MultiRelationGraph g = hagnn::load_graph_csv(data);
  auto rows = hagnn::lambda_sweep(g, config, lambdas, seeds, jobs);
  std::string csv = hagnn::run_rows_csv(rows);
  hagnn::write_file((fs::path(out) / "lambda_sweep.csv").string(), csv);
  std::cout << csv;
  return 0;
}

int cmd_gradcheck(uint64_t seed, double tolerance) {
  hagnn::MultiRelationGraph g = hagnn::gradcheck_graph(seed);
  hagnn::TrainConfig config = hagnn::gradcheck_config(seed);
  hagnn::DatasetSplit split =
      hagnn::split_nodes(g, config.train_fraction, hagnn::Rng(seed).fork("split"));
  hagnn::ModelState state = hagnn::init_model(g, config);
  hagnn::GradCheckResult result = hagnn::gradcheck_model(g, split, state);
  std::cout << "checked " << result.entries_checked << " parameter entries\n";
  std::cout << "worst relative error " << hagnn::fmt_double(result.worst_rel_err) << " at "
            << result.worst_param << "[" << result.worst_index << "]\n";
  if (!result.pass(tolerance)) {
    std::cerr << "gradient check FAILED: " << result.worst_param << " exceeds tolerance "
              << hagnn::fmt_double(tolerance) << "\n";
    return 1;
  }
  std::cout << "gradient check passed (tolerance " << hagnn::fmt_double(tolerance) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolVersion) +
               " - hierarchical-attention GNN fraud detection on multi-relation graphs"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic camouflaged graph");
  hagnn::SynthConfig synth_cfg;
  std::string synth_out, edge_prob_str;
  synth->add_option("--nodes", synth_cfg.num_nodes, "node count");
  synth->add_option("--fraud-frac", synth_cfg.fraud_fraction, "fraud fraction in (0,1)");
  synth->add_option("--relations", synth_cfg.num_relations, "relation count");
  synth->add_option("--edge-prob", edge_prob_str, "per-relation intra-class edge probability");
  synth->add_option("--fraud-density", synth_cfg.fraud_density,
                    "fraud-fraud edge probability multiplier");
  synth->add_option("--camouflage", synth_cfg.camouflage_rate, "fraud edge rewire rate");
  synth->add_option("--feature-camouflage", synth_cfg.feature_camouflage_rate,
                    "fraudster legit-feature rate");
  synth->add_option("--feature-dim", synth_cfg.feature_dim, "feature dimension");
  synth->add_option("--feature-shift", synth_cfg.feature_shift, "fraud feature mean offset");
  synth->add_option("--seed", synth_cfg.seed, "random seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  // stats
  auto* stats = app.add_subcommand("stats", "graph statistics and camouflage report");
  std::string stats_data, stats_out, stats_mode = "dim";
  stats->add_option("--data", stats_data, "dataset directory")->required();
  stats->add_option("--out", stats_out, "output directory")->required();
  stats->add_option("--feature-sim", stats_mode, "feature similarity mode: dim or raw");

  // train
  auto* train = app.add_subcommand("train", "train a model");
  std::string train_data, train_out;
  ConfigFlags train_flags;
  uint64_t train_seed = 0;
  int train_epochs = 0;
  std::string train_variant, train_lambda;
  train->add_option("--data", train_data, "dataset directory")->required();
  train->add_option("--out", train_out, "output directory")->required();
  train_flags.attach(train);
  auto* opt_seed = train->add_option("--seed", train_seed, "random seed");
  auto* opt_epochs = train->add_option("--epochs", train_epochs, "epoch count");
  auto* opt_variant = train->add_option("--variant", train_variant, "full, v1, v2 or f");
  auto* opt_lambda = train->add_option("--lambda", train_lambda, "legit-class loss weight");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string eval_model, eval_data, eval_out;
  eval->add_option("--model", eval_model, "model.hagnn path")->required();
  eval->add_option("--data", eval_data, "dataset directory")->required();
  eval->add_option("--out", eval_out, "output directory")->required();

  // ablate
  auto* ablate = app.add_subcommand("ablate", "compare v1 / v2 / full variants");
  std::string ab_data, ab_out, ab_seeds = "1,2,3,4,5";
  ConfigFlags ab_flags;
  bool ab_include_f = false;
  int ab_jobs = 1;
  ablate->add_option("--data", ab_data, "dataset directory")->required();
  ablate->add_option("--out", ab_out, "output directory")->required();
  ablate->add_option("--seeds", ab_seeds, "comma-separated seeds");
  ablate->add_flag("--include-f", ab_include_f, "also run the feature-concat variant");
  ablate->add_option("--jobs", ab_jobs, "parallel workers");
  ab_flags.attach(ablate);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sweep the class-balance weight");
  std::string sw_data, sw_out, sw_seeds = "1,2,3,4,5", sw_lambdas = "0.2,0.4,0.6,0.8";
  ConfigFlags sw_flags;
  int sw_jobs = 1;
  sweep->add_option("--data", sw_data, "dataset directory")->required();
  sweep->add_option("--out", sw_out, "output directory")->required();
  sweep->add_option("--lambdas", sw_lambdas, "comma-separated lambda values");
  sweep->add_option("--seeds", sw_seeds, "comma-separated seeds");
  sweep->add_option("--jobs", sw_jobs, "parallel workers");
  sw_flags.attach(sweep);

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  uint64_t gc_seed = 1;
  double gc_tol = 1e-4;
  gradcheck->add_option("--seed", gc_seed, "random seed");
  gradcheck->add_option("--tolerance", gc_tol, "max relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth) {
      if (!edge_prob_str.empty()) synth_cfg.edge_prob = parse_double_list(edge_prob_str, "--edge-prob");
      return cmd_synth(synth_cfg, synth_out);
    }
    if (*stats) return cmd_stats(stats_data, stats_out, stats_mode);
    if (*train) {
      hagnn::TrainConfig config = train_flags.resolve();
      if (opt_seed->count()) config.seed = train_seed;
      if (opt_epochs->count()) config.epochs = train_epochs;
      if (opt_variant->count()) config.variant = hagnn::parse_variant(train_variant);
      if (opt_lambda->count()) hagnn::apply_config_entry(config, "lambda", train_lambda);
      config.validate();
      return cmd_train(config, train_data, train_out);
    }
    if (*eval) return cmd_eval(eval_model, eval_data, eval_out);
    if (*ablate)
      return cmd_ablate(ab_flags.resolve(), ab_data, ab_out, parse_seed_list(ab_seeds),
                        ab_include_f, ab_jobs);
    if (*sweep)
      return cmd_sweep(sw_flags.resolve(), sw_data, sw_out,
                       parse_double_list(sw_lambdas, "--lambdas"), parse_seed_list(sw_seeds),
                       sw_jobs);
    if (*gradcheck) return cmd_gradcheck(gc_seed, gc_tol);
  } catch (const hagnn::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
