#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hagnn/common.hpp"
#include "hagnn/graph.hpp"

using namespace hagnn;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  static uint64_t counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("hagnn_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
  fs::create_directories(p);
  return p;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& cwd = fs::current_path()) {
  fs::path dir = temp_dir("io");
  fs::path out = dir / "stdout.txt";
  fs::path err = dir / "stderr.txt";
  std::string cmd = "cd '" + cwd.string() + "' && '" + std::string(HAGNN_BIN) + "' " + args +
                    " > '" + out.string() + "' 2> '" + err.string() + "'";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out.string());
  r.err = read_file(err.string());
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::string csv_field(const std::string& line, size_t idx) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line + ",") {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return cells.at(idx);
}

}  // namespace

TEST_CASE("synth is deterministic and validates its flags") {
  auto d1 = temp_dir("synth1");
  auto d2 = temp_dir("synth2");
  std::string flags = "synth --nodes 120 --seed 7 --out ";
  CHECK(run_cli(flags + "'" + (d1 / "g").string() + "'").exit_code == 0);
  CHECK(run_cli(flags + "'" + (d2 / "g").string() + "'").exit_code == 0);
  for (std::string name : {"nodes.csv", "edges_r0.csv", "edges_r1.csv", "edges_r2.csv",
                           "synth_meta.json"})
    CHECK(read_file((d1 / "g" / name).string()) == read_file((d2 / "g" / name).string()));
  CHECK(fs::exists(d1 / "g" / "run_manifest.json"));

  RunResult bad = run_cli("synth --fraud-frac 1.5 --out '" + (d1 / "bad").string() + "'");
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("fraud_fraction") != std::string::npos);

  RunResult unknown = run_cli("synth --no-such-flag 1 --out x");
  CHECK(unknown.exit_code == 2);
}

TEST_CASE("generated graphs pass the stats invariant audit") {
  auto dir = temp_dir("audit");
  auto data = (dir / "g").string();
  REQUIRE(run_cli("synth --nodes 150 --seed 3 --out '" + data + "'").exit_code == 0);
  RunResult stats = run_cli("stats --data '" + data + "' --out '" + (dir / "s").string() + "'");
  CHECK(stats.exit_code == 0);
  CHECK(fs::exists(dir / "s" / "camouflage_report.csv"));
  auto rows = lines_of(read_file((dir / "s" / "camouflage_report.csv").string()));
  CHECK(rows.size() == 5);  // header + 3 relations + ALL
}

TEST_CASE("stats on a one-class graph reports label similarity 1.0 everywhere") {
  auto dir = temp_dir("oneclass");
  fs::create_directories(dir / "g");
  write_file((dir / "g" / "nodes.csv").string(),
             "id,label,f0\n0,0,0.1\n1,0,0.2\n2,0,0.3\n3,0,0.4\n");
  write_file((dir / "g" / "edges_a.csv").string(), "src,dst\n0,1\n1,2\n");
  write_file((dir / "g" / "edges_b.csv").string(), "src,dst\n2,3\n");
  RunResult stats = run_cli("stats --data '" + (dir / "g").string() + "' --out '" +
                            (dir / "s").string() + "'");
  REQUIRE(stats.exit_code == 0);
  auto rows = lines_of(read_file((dir / "s" / "camouflage_report.csv").string()));
  for (size_t i = 1; i < rows.size(); ++i) CHECK(csv_field(rows[i], 3) == "1");
}

TEST_CASE("train then eval reproduces the final epoch metrics exactly") {
  auto dir = temp_dir("traineval");
  auto data = (dir / "g").string();
  REQUIRE(run_cli("synth --nodes 150 --seed 5 --out '" + data + "'").exit_code == 0);
  RunResult train = run_cli("train --data '" + data + "' --out '" + (dir / "run").string() +
                            "' --seed 9 --epochs 4");
  REQUIRE(train.exit_code == 0);
  auto log_rows = lines_of(read_file((dir / "run" / "train_log.csv").string()));
  REQUIRE(log_rows.size() == 5);  // header + 4 epochs
  std::string final_auc = csv_field(log_rows.back(), 4);
  std::string final_recall = csv_field(log_rows.back(), 5);

  RunResult eval = run_cli("eval --model '" + (dir / "run" / "model.hagnn").string() +
                           "' --data '" + data + "' --out '" + (dir / "ev").string() + "'");
  REQUIRE(eval.exit_code == 0);
  auto metric_rows = lines_of(read_file((dir / "ev" / "metrics.csv").string()));
  REQUIRE(metric_rows.size() == 3);  // header + train + test
  CHECK(csv_field(metric_rows[2], 0) == "test");
  CHECK(csv_field(metric_rows[2], 1) == final_auc);
  CHECK(csv_field(metric_rows[2], 2) == final_recall);
}

TEST_CASE("eval rejects a truncated checkpoint with exit 1") {
  auto dir = temp_dir("truncated");
  auto data = (dir / "g").string();
  REQUIRE(run_cli("synth --nodes 120 --seed 2 --out '" + data + "'").exit_code == 0);
  REQUIRE(run_cli("train --data '" + data + "' --out '" + (dir / "run").string() +
                  "' --epochs 2")
              .exit_code == 0);
  std::string model = (dir / "run" / "model.hagnn").string();
  std::string blob = read_file(model);
  write_file(model, blob.substr(0, blob.size() / 3));
  RunResult eval = run_cli("eval --model '" + model + "' --data '" + data + "' --out '" +
                           (dir / "ev").string() + "'");
  CHECK(eval.exit_code == 1);
  CHECK(eval.err.find("checkpoint corrupt") != std::string::npos);
}

TEST_CASE("train rejects usage errors with exit 2 and leaves inputs unmodified") {
  auto dir = temp_dir("usage");
  auto data = (dir / "g").string();
  REQUIRE(run_cli("synth --nodes 120 --seed 2 --out '" + data + "'").exit_code == 0);
  std::string digest_before = file_digest_hex(data + "/nodes.csv");

  CHECK(run_cli("train --data '" + data + "' --out '" + (dir / "r").string() +
                "' --variant nope")
            .exit_code == 2);
  CHECK(run_cli("train --data '" + data + "' --out '" + (dir / "r").string() +
                "' --set lambda=7")
            .exit_code == 2);
  CHECK(run_cli("train --out missing-data-flag").exit_code == 2);

  REQUIRE(run_cli("train --data '" + data + "' --out '" + (dir / "r").string() +
                  "' --epochs 2")
              .exit_code == 0);
  CHECK(file_digest_hex(data + "/nodes.csv") == digest_before);
}

TEST_CASE("config file values apply and flags override them") {
  auto dir = temp_dir("config");
  auto data = (dir / "g").string();
  REQUIRE(run_cli("synth --nodes 120 --seed 4 --out '" + data + "'").exit_code == 0);
  write_file((dir / "cfg.txt").string(), "epochs = 3\nlambda = 0.5\nseed = 21\n");
  RunResult r = run_cli("train --data '" + data + "' --out '" + (dir / "run").string() +
                        "' --config '" + (dir / "cfg.txt").string() + "' --epochs 2");
  REQUIRE(r.exit_code == 0);
  auto log_rows = lines_of(read_file((dir / "run" / "train_log.csv").string()));
  CHECK(log_rows.size() == 3);  // header + 2 epochs (flag wins over file)
  std::string manifest = read_file((dir / "run" / "run_manifest.json").string());
  CHECK(manifest.find("\"lambda\": \"0.5\"") != std::string::npos);
  CHECK(manifest.find("\"seed\": 21") != std::string::npos);
}

TEST_CASE("ablate and sweep emit the documented row grids") {
  auto dir = temp_dir("drivers");
  auto data = (dir / "g").string();
  REQUIRE(run_cli("synth --nodes 150 --seed 6 --out '" + data + "'").exit_code == 0);

  RunResult ab = run_cli("ablate --data '" + data + "' --out '" + (dir / "ab").string() +
                         "' --seeds 1,2 --set epochs=2 --jobs 2");
  REQUIRE(ab.exit_code == 0);
  auto ab_rows = lines_of(read_file((dir / "ab" / "ablation.csv").string()));
  CHECK(ab_rows.size() == 7);  // header + 3 variants x 2 seeds

  RunResult sw = run_cli("sweep --data '" + data + "' --out '" + (dir / "sw").string() +
                         "' --lambdas 0.2,0.4,0.6,0.8 --seeds 3 --set epochs=2");
  REQUIRE(sw.exit_code == 0);
  auto sw_rows = lines_of(read_file((dir / "sw" / "lambda_sweep.csv").string()));
  CHECK(sw_rows.size() == 5);  // header + 4 lambdas x 1 seed
  CHECK(csv_field(sw_rows[1], 0).substr(0, 3) == "0.2");
}

TEST_CASE("gradcheck command passes at the default seed") {
  RunResult r = run_cli("gradcheck");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("worst relative error") != std::string::npos);
  CHECK(r.out.find("gradient check passed") != std::string::npos);
}

TEST_CASE("commands are idempotent: re-running into the same directory is byte-stable") {
  auto dir = temp_dir("idem");
  auto data = (dir / "g").string();
  std::string train_cmd =
      "train --data '" + data + "' --out '" + (dir / "run").string() + "' --epochs 3 --seed 11";
  REQUIRE(run_cli("synth --nodes 130 --seed 8 --out '" + data + "'").exit_code == 0);
  REQUIRE(run_cli(train_cmd).exit_code == 0);
  std::string log1 = read_file((dir / "run" / "train_log.csv").string());
  std::string model1 = read_file((dir / "run" / "model.hagnn").string());
  std::string manifest1 = read_file((dir / "run" / "run_manifest.json").string());
  REQUIRE(run_cli(train_cmd).exit_code == 0);
  CHECK(read_file((dir / "run" / "train_log.csv").string()) == log1);
  CHECK(read_file((dir / "run" / "model.hagnn").string()) == model1);
  CHECK(read_file((dir / "run" / "run_manifest.json").string()) == manifest1);
}
