#include "hagnn/experiments.hpp"

#include <atomic>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

namespace hagnn {

namespace {

// Tasks are pure; worker threads only write their own result slot, so the
// output is identical for any job count.
template <typename Task>
void run_parallel(const std::vector<Task>& tasks, int jobs) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || tasks.size() <= 1) {
    for (const auto& t : tasks) t();
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::mutex error_mu;
  for (int w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          tasks[i]();
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

RunRow train_one(const MultiRelationGraph& g, TrainConfig config, const std::string& key,
                 uint64_t seed) {
  config.seed = seed;
  config.validate();
  DatasetSplit split = split_nodes(g, config.train_fraction, Rng(seed).fork("split"));
  ModelState state = init_model(g, config);
  auto logs = train(g, split, state);
  RunRow row;
  row.key = key;
  row.seed = seed;
  row.auc = logs.back().test_auc;
  row.recall = logs.back().test_recall;
  return row;
}

}  // namespace

std::string run_rows_csv(const std::vector<RunRow>& rows) {
  std::ostringstream out;
  out << "variant_or_lambda,auc,recall,seed\n";
  for (const auto& row : rows)
    out << row.key << "," << fmt_double(row.auc) << "," << fmt_double(row.recall) << ","
        << row.seed << "\n";
  return out.str();
}

std::vector<RunRow> ablate(const MultiRelationGraph& g, const TrainConfig& base,
                           const std::vector<uint64_t>& seeds, bool include_f, int jobs) {
  if (seeds.empty()) throw ConfigError("ablate: need at least one seed");
  std::vector<Variant> variants = {Variant::V1, Variant::V2, Variant::Full};
  if (include_f) variants.push_back(Variant::F);

  std::vector<RunRow> rows(seeds.size() * variants.size());
  std::vector<std::function<void()>> tasks;
  for (size_t s = 0; s < seeds.size(); ++s)
    for (size_t v = 0; v < variants.size(); ++v) {
      size_t slot = s * variants.size() + v;
      tasks.push_back([&g, &base, &rows, &seeds, &variants, s, v, slot] {
        TrainConfig config = base;
        config.variant = variants[v];
        rows[slot] = train_one(g, config, variant_name(variants[v]), seeds[s]);
      });
    }
  run_parallel(tasks, jobs);
  return rows;
}

std::vector<RunRow> lambda_sweep(const MultiRelationGraph& g, const TrainConfig& base,
                                 const std::vector<double>& lambdas,
                                 const std::vector<uint64_t>& seeds, int jobs) {
  if (seeds.empty()) throw ConfigError("lambda_sweep: need at least one seed");
  if (lambdas.empty()) throw ConfigError("lambda_sweep: need at least one lambda");
  for (double l : lambdas)
    if (!(l > 0.0 && l <= 1.0)) throw ConfigError("lambda values must be in (0,1]");

  std::vector<RunRow> rows(seeds.size() * lambdas.size());
  std::vector<std::function<void()>> tasks;
  for (size_t s = 0; s < seeds.size(); ++s)
    for (size_t li = 0; li < lambdas.size(); ++li) {
      size_t slot = s * lambdas.size() + li;
      tasks.push_back([&g, &base, &rows, &seeds, &lambdas, s, li, slot] {
        TrainConfig config = base;
        config.lambda = lambdas[li];
        rows[slot] = train_one(g, config, fmt_double(lambdas[li]), seeds[s]);
      });
    }
  run_parallel(tasks, jobs);
  return rows;
}

}  // namespace hagnn
