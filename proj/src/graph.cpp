#include "hagnn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fs = std::filesystem;

namespace hagnn {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

long parse_int(const std::string& s, const std::string& what, int line_no) {
  char* end = nullptr;
  const std::string t = trim(s);
  long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end == nullptr || *end != '\0')
    throw IngestError("bad " + what + " '" + s + "' at line " + std::to_string(line_no));
  return v;
}

double parse_double(const std::string& s, const std::string& what, int line_no) {
  char* end = nullptr;
  const std::string t = trim(s);
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end == nullptr || *end != '\0' || !std::isfinite(v))
    throw IngestError("bad " + what + " '" + s + "' at line " + std::to_string(line_no));
  return v;
}

}  // namespace

// ---- SparseMatrix ----------------------------------------------------------

SparseMatrix SparseMatrix::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  SparseMatrix m;
  m.n_ = n;
  m.offsets_.assign(static_cast<size_t>(n) + 1, 0);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw IngestError("edge endpoint out of range: (" + std::to_string(u) + "," +
                        std::to_string(v) + ")");
    if (u == v) throw IngestError("self-loop in canonical edge list");
    m.offsets_[u + 1]++;
    m.offsets_[v + 1]++;
  }
  for (int i = 0; i < n; ++i) m.offsets_[i + 1] += m.offsets_[i];
  m.cols_.resize(static_cast<size_t>(m.offsets_[n]));
  std::vector<int64_t> cursor(m.offsets_.begin(), m.offsets_.end() - 1);
  for (auto [u, v] : edges) {
    m.cols_[static_cast<size_t>(cursor[u]++)] = v;
    m.cols_[static_cast<size_t>(cursor[v]++)] = u;
  }
  for (int i = 0; i < n; ++i) {
    auto b = m.cols_.begin() + m.offsets_[i];
    auto e = m.cols_.begin() + m.offsets_[i + 1];
    std::sort(b, e);
    if (std::adjacent_find(b, e) != e)
      throw IngestError("duplicate edge in canonical edge list at node " + std::to_string(i));
  }
  return m;
}

bool SparseMatrix::has_edge(int i, int j) const {
  auto r = row(i);
  return std::binary_search(r.begin(), r.end(), j);
}

std::vector<std::pair<int, int>> SparseMatrix::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<size_t>(nnz() / 2));
  for (int i = 0; i < n_; ++i)
    for (int j : row(i))
      if (i < j) out.emplace_back(i, j);
  return out;
}

// ---- edge lists ------------------------------------------------------------

RelationEdgeList canonicalize_edges(int relation_id, std::string name,
                                    std::vector<std::pair<int, int>> raw) {
  RelationEdgeList out;
  out.relation_id = relation_id;
  out.name = std::move(name);
  out.edges.reserve(raw.size());
  for (auto [u, v] : raw) {
    if (u == v) {
      out.self_pairs_dropped++;
      continue;
    }
    out.edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(out.edges.begin(), out.edges.end());
  size_t before = out.edges.size();
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  out.duplicates_dropped = static_cast<int64_t>(before - out.edges.size());
  return out;
}

// ---- graph -----------------------------------------------------------------

SparseMatrix MultiRelationGraph::union_adjacency() const {
  std::vector<std::pair<int, int>> all;
  for (const auto& rel : relations) {
    auto e = rel.edges();
    all.insert(all.end(), e.begin(), e.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return SparseMatrix::from_edges(num_nodes, all);
}

void MultiRelationGraph::validate() const {
  if (num_nodes <= 0) throw IngestError("graph has no nodes");
  if (relations.empty()) throw IngestError("graph has no relations");
  if (static_cast<int>(labels.size()) != num_nodes) throw IngestError("label vector size mismatch");
  if (features.size() != static_cast<size_t>(num_nodes) * feature_dim)
    throw IngestError("feature matrix size mismatch");
  for (int y : labels)
    if (y != 0 && y != 1 && y != kLabelUnknown)
      throw IngestError("label out of {0,1,unknown}");
  for (const auto& rel : relations) {
    if (rel.size() != num_nodes) throw IngestError("relation dimension mismatch");
    for (int i = 0; i < num_nodes; ++i) {
      for (int j : rel.row(i)) {
        if (j == i) throw IngestError("self-loop in adjacency");
        if (!rel.has_edge(j, i)) throw IngestError("asymmetric adjacency");
      }
    }
  }
}

NeighborList NeighborList::from_graph(const MultiRelationGraph& g) {
  return from_union(g.union_adjacency());
}

NeighborList NeighborList::from_union(const SparseMatrix& u) {
  NeighborList nl;
  nl.n_ = u.size();
  nl.offsets_.assign(static_cast<size_t>(nl.n_) + 1, 0);
  for (int i = 0; i < nl.n_; ++i) nl.offsets_[i + 1] = nl.offsets_[i] + u.degree(i) + 1;
  nl.ids_.resize(static_cast<size_t>(nl.offsets_[nl.n_]));
  for (int i = 0; i < nl.n_; ++i) {
    int64_t o = nl.offsets_[i];
    bool placed = false;
    for (int j : u.row(i)) {
      if (!placed && j > i) {
        nl.ids_[static_cast<size_t>(o++)] = i;
        placed = true;
      }
      nl.ids_[static_cast<size_t>(o++)] = j;
    }
    if (!placed) nl.ids_[static_cast<size_t>(o++)] = i;
  }
  return nl;
}

// ---- ingestion -------------------------------------------------------------

NodeTable load_nodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty node file: " + path);
  auto header = split_csv_line(line);
  if (header.size() < 2 || trim(header[0]) != "id" || trim(header[1]) != "label")
    throw IngestError("node file header must start with id,label: " + path);
  const int d = static_cast<int>(header.size()) - 2;

  NodeTable t;
  t.feature_dim = d;
  int line_no = 1;
  int expected_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != d + 2)
      throw IngestError("ragged row (" + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(d + 2) + ") at line " + std::to_string(line_no));
    long id = parse_int(cells[0], "id", line_no);
    if (id != expected_id)
      throw IngestError("non-contiguous ids at line " + std::to_string(line_no));
    ++expected_id;
    std::string lab = trim(cells[1]);
    if (lab.empty())
      t.labels.push_back(kLabelUnknown);
    else if (lab == "0" || lab == "1")
      t.labels.push_back(lab == "1" ? 1 : 0);
    else
      throw IngestError("label must be 0, 1 or empty at line " + std::to_string(line_no));
    for (int k = 0; k < d; ++k)
      t.features.push_back(parse_double(cells[2 + k], "feature", line_no));
  }
  t.num_nodes = expected_id;
  if (t.num_nodes == 0) throw IngestError("node file has no rows: " + path);
  return t;
}

RelationEdgeList load_relation_edges(const std::string& path, int relation_id, int num_nodes,
                                     std::string name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty edge file: " + path);
  auto header = split_csv_line(line);
  if (header.size() != 2 || trim(header[0]) != "src" || trim(header[1]) != "dst")
    throw IngestError("edge file header must be src,dst: " + path);

  std::vector<std::pair<int, int>> raw;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 2) throw IngestError("ragged row at line " + std::to_string(line_no));
    long u = parse_int(cells[0], "src", line_no);
    long v = parse_int(cells[1], "dst", line_no);
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
      throw IngestError("edge endpoint out of range at line " + std::to_string(line_no));
    raw.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  return canonicalize_edges(relation_id, std::move(name), std::move(raw));
}

std::optional<int> EventTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

EventTable load_event_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty event table: " + path);
  EventTable t;
  for (auto& c : split_csv_line(line)) t.columns.push_back(trim(c));
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.columns.size())
      throw IngestError("ragged row at line " + std::to_string(line_no));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CliqueRule parse_clique_rule(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size())
    throw ConfigError("unknown rule '" + text + "', expected node_col:key1+key2");
  CliqueRule rule;
  rule.node_column = trim(text.substr(0, colon));
  std::string keys = text.substr(colon + 1);
  std::string cur;
  for (char c : keys + "+") {
    if (c == '+') {
      if (!trim(cur).empty()) rule.key_columns.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (rule.key_columns.empty()) throw ConfigError("unknown rule '" + text + "': no key columns");
  return rule;
}

namespace {

// Pair index m in [0, k*(k-1)/2) -> (i, j) with i < j, ordered by i then j.
std::pair<int, int> decode_pair(int64_t m, int64_t k) {
  int64_t lo = 0, hi = k - 1;  // find i: offset(i) <= m < offset(i+1)
  auto offset = [k](int64_t i) { return i * (2 * k - i - 1) / 2; };
  while (lo < hi) {
    int64_t mid = (lo + hi + 1) / 2;
    if (offset(mid) <= m)
      lo = mid;
    else
      hi = mid - 1;
  }
  int64_t i = lo;
  int64_t j = i + 1 + (m - offset(i));
  return {static_cast<int>(i), static_cast<int>(j)};
}

}  // namespace

RelationEdgeList build_relations_from_events(const EventTable& table, const CliqueRule& rule,
                                             int relation_id, int num_nodes, int cap, Rng rng,
                                             CliqueBuildReport* report) {
  auto node_col = table.column_index(rule.node_column);
  if (!node_col) throw ConfigError("missing key column '" + rule.node_column + "'");
  std::vector<int> key_cols;
  for (const auto& k : rule.key_columns) {
    auto idx = table.column_index(k);
    if (!idx) throw ConfigError("missing key column '" + k + "'");
    key_cols.push_back(*idx);
  }
  if (cap < 2) throw ConfigError("clique cap must be >= 2");

  // Group node ids by composite key. std::map keeps group order deterministic.
  std::map<std::string, std::vector<int>> groups;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::string key;
    for (int c : key_cols) {
      key += row[static_cast<size_t>(c)];
      key += '\x1f';
    }
    long id = parse_int(row[static_cast<size_t>(*node_col)], "node id",
                        static_cast<int>(r) + 2);
    if (id < 0 || id >= num_nodes)
      throw IngestError("node id out of range at line " + std::to_string(r + 2));
    groups[key].push_back(static_cast<int>(id));
  }

  CliqueBuildReport rep;
  std::vector<std::pair<int, int>> raw;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    rep.groups++;
    int64_t k = static_cast<int64_t>(members.size());
    if (k < 2) continue;
    if (k <= cap) {
      for (int64_t a = 0; a < k; ++a)
        for (int64_t b = a + 1; b < k; ++b)
          raw.emplace_back(members[static_cast<size_t>(a)], members[static_cast<size_t>(b)]);
    } else {
      rep.capped_groups++;
      int64_t want = static_cast<int64_t>(cap) * (cap - 1) / 2;
      int64_t total = k * (k - 1) / 2;
      // Floyd's algorithm: `want` distinct pair indices out of `total`.
      std::unordered_set<int64_t> chosen;
      chosen.reserve(static_cast<size_t>(want) * 2);
      for (int64_t j = total - want; j < total; ++j) {
        int64_t t = static_cast<int64_t>(rng.below(static_cast<uint64_t>(j + 1)));
        if (!chosen.insert(t).second) chosen.insert(j);
      }
      std::vector<int64_t> picks(chosen.begin(), chosen.end());
      std::sort(picks.begin(), picks.end());
      for (int64_t m : picks) {
        auto [a, b] = decode_pair(m, k);
        raw.emplace_back(members[static_cast<size_t>(a)], members[static_cast<size_t>(b)]);
        rep.subsampled_pairs++;
      }
    }
  }
  if (report) *report = rep;
  return canonicalize_edges(relation_id, rule.node_column, std::move(raw));
}

MultiRelationGraph assemble(NodeTable nodes, std::vector<RelationEdgeList> edge_lists,
                            std::vector<std::string> relation_names) {
  MultiRelationGraph g;
  g.num_nodes = nodes.num_nodes;
  g.feature_dim = nodes.feature_dim;
  g.features = std::move(nodes.features);
  g.labels = std::move(nodes.labels);
  for (size_t r = 0; r < edge_lists.size(); ++r) {
    g.relations.push_back(SparseMatrix::from_edges(g.num_nodes, edge_lists[r].edges));
    std::string name = r < relation_names.size() ? relation_names[r] : edge_lists[r].name;
    if (name.empty()) name = "r" + std::to_string(r);
    g.relation_names.push_back(name);
  }
  g.validate();
  return g;
}

std::vector<double> adjacency_row(const MultiRelationGraph& g, int relation, int node) {
  if (relation < 0 || relation >= g.num_relations())
    throw std::out_of_range("relation index out of range");
  if (node < 0 || node >= g.num_nodes) throw std::out_of_range("node index out of range");
  std::vector<double> row(static_cast<size_t>(g.num_nodes), 0.0);
  for (int j : g.relations[static_cast<size_t>(relation)].row(node)) row[static_cast<size_t>(j)] = 1.0;
  return row;
}

std::vector<int> neighbor_union(const MultiRelationGraph& g, int node) {
  if (node < 0 || node >= g.num_nodes) throw std::out_of_range("node index out of range");
  std::vector<int> out;
  out.push_back(node);
  for (const auto& rel : g.relations) {
    auto r = rel.row(node);
    out.insert(out.end(), r.begin(), r.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---- synthetic -------------------------------------------------------------

void SynthConfig::validate() const {
  if (num_nodes < 4) throw ConfigError("num_nodes must be >= 4");
  if (!(fraud_fraction > 0.0 && fraud_fraction < 1.0))
    throw ConfigError("fraud_fraction must be in (0,1)");
  if (num_relations < 1) throw ConfigError("num_relations must be >= 1");
  if (edge_prob.empty()) throw ConfigError("edge_prob must not be empty");
  for (double p : edge_prob)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("edge_prob entries must be in [0,1]");
  if (!(fraud_density > 0.0)) throw ConfigError("fraud_density must be > 0");
  if (!(camouflage_rate >= 0.0 && camouflage_rate <= 1.0))
    throw ConfigError("camouflage_rate must be in [0,1]");
  if (!(feature_camouflage_rate >= 0.0 && feature_camouflage_rate <= 1.0))
    throw ConfigError("feature_camouflage_rate must be in [0,1]");
  if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
}

MultiRelationGraph generate_synthetic(const SynthConfig& config) {
  config.validate();
  Rng root(config.seed);
  const int n = config.num_nodes;

  // Class assignment: shuffled ids, first round(n*fraction) are fraud.
  Rng label_rng = root.fork("labels");
  int n_fraud = static_cast<int>(std::floor(config.fraud_fraction * n + 0.5));
  n_fraud = std::max(1, std::min(n - 1, n_fraud));
  std::vector<int> ids(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<size_t>(i)] = i;
  label_rng.shuffle(ids);
  std::vector<int> labels(static_cast<size_t>(n), 0);
  for (int i = 0; i < n_fraud; ++i) labels[static_cast<size_t>(ids[static_cast<size_t>(i)])] = 1;

  // Features: legit ~ N(0,1)^d, fraud ~ N(shift,1)^d unless camouflaged.
  Rng feat_rng = root.fork("features");
  const int d = config.feature_dim;
  std::vector<double> features(static_cast<size_t>(n) * d);
  for (int i = 0; i < n; ++i) {
    double mean = 0.0;
    if (labels[static_cast<size_t>(i)] == 1 &&
        !feat_rng.bernoulli(config.feature_camouflage_rate))
      mean = config.feature_shift;
    for (int k = 0; k < d; ++k)
      features[static_cast<size_t>(i) * d + k] = mean + feat_rng.normal();
  }

  std::vector<RelationEdgeList> lists;
  for (int r = 0; r < config.num_relations; ++r) {
    double p = config.edge_prob[std::min(static_cast<size_t>(r), config.edge_prob.size() - 1)];
    double p_fraud = std::min(1.0, p * config.fraud_density);
    Rng edge_rng = root.fork("edges", static_cast<uint64_t>(r));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (labels[static_cast<size_t>(i)] != labels[static_cast<size_t>(j)]) continue;
        if (edge_rng.bernoulli(labels[static_cast<size_t>(i)] == 1 ? p_fraud : p))
          edges.emplace_back(i, j);
      }

    // Relation camouflage: each fraud-fraud edge is independently rewired to
    // a fraud-legit edge with probability camouflage_rate.
    Rng camo_rng = root.fork("camouflage", static_cast<uint64_t>(r));
    std::vector<int> legit_ids;
    for (int i = 0; i < n; ++i)
      if (labels[static_cast<size_t>(i)] == 0) legit_ids.push_back(i);
    std::unordered_set<int64_t> edge_set;
    edge_set.reserve(edges.size() * 2);
    auto key = [n](int u, int v) { return static_cast<int64_t>(u) * n + v; };
    for (auto [u, v] : edges) edge_set.insert(key(u, v));
    for (auto& e : edges) {
      if (labels[static_cast<size_t>(e.first)] != 1 || labels[static_cast<size_t>(e.second)] != 1)
        continue;
      if (!camo_rng.bernoulli(config.camouflage_rate)) continue;
      int keep = camo_rng.bernoulli(0.5) ? e.first : e.second;
      for (int attempt = 0; attempt < 100; ++attempt) {
        int repl = legit_ids[static_cast<size_t>(camo_rng.below(legit_ids.size()))];
        int u = std::min(keep, repl), v = std::max(keep, repl);
        if (edge_set.count(key(u, v))) continue;
        edge_set.erase(key(e.first, e.second));
        edge_set.insert(key(u, v));
        e = {u, v};
        break;
      }
    }
    lists.push_back(canonicalize_edges(r, "r" + std::to_string(r), std::move(edges)));
  }

  NodeTable nodes;
  nodes.num_nodes = n;
  nodes.feature_dim = d;
  nodes.features = std::move(features);
  nodes.labels = std::move(labels);
  return assemble(std::move(nodes), std::move(lists));
}

SynthConfig benchmark_config(uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  return c;
}

// ---- splits ----------------------------------------------------------------

uint64_t DatasetSplit::hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const std::vector<int>& v) {
    h = fnv1a(v.data(), v.size() * sizeof(int), h);
    h = fnv1a("|", 1, h);
  };
  mix(train_nodes);
  mix(test_nodes);
  return h;
}

DatasetSplit split_nodes(const MultiRelationGraph& g, double train_fraction, Rng rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must be in (0,1)");
  std::vector<int> fraud, legit;
  for (int i = 0; i < g.num_nodes; ++i) {
    if (g.labels[static_cast<size_t>(i)] == 1) fraud.push_back(i);
    if (g.labels[static_cast<size_t>(i)] == 0) legit.push_back(i);
  }
  if (fraud.empty()) throw IngestError("no labeled fraud nodes");
  if (legit.empty()) throw IngestError("no labeled legit nodes");

  DatasetSplit split;
  auto take = [&](std::vector<int> cls, std::vector<int>& train_cls) {
    rng.shuffle(cls);
    size_t n_train =
        static_cast<size_t>(std::floor(train_fraction * static_cast<double>(cls.size()) + 0.5));
    for (size_t i = 0; i < cls.size(); ++i) {
      if (i < n_train) {
        split.train_nodes.push_back(cls[i]);
        train_cls.push_back(cls[i]);
      } else {
        split.test_nodes.push_back(cls[i]);
      }
    }
  };
  take(std::move(legit), split.train_legit);
  take(std::move(fraud), split.train_fraud);
  std::sort(split.train_nodes.begin(), split.train_nodes.end());
  std::sort(split.test_nodes.begin(), split.test_nodes.end());
  std::sort(split.train_legit.begin(), split.train_legit.end());
  std::sort(split.train_fraud.begin(), split.train_fraud.end());
  return split;
}

// ---- CSV layout ------------------------------------------------------------

void write_graph_csv(const MultiRelationGraph& g, const std::string& dir) {
  fs::create_directories(dir);
  std::ostringstream nodes;
  nodes << "id,label";
  for (int k = 0; k < g.feature_dim; ++k) nodes << ",f" << k;
  nodes << "\n";
  for (int i = 0; i < g.num_nodes; ++i) {
    nodes << i << ",";
    int y = g.labels[static_cast<size_t>(i)];
    if (y != kLabelUnknown) nodes << y;
    for (double x : g.feature_row(i)) nodes << "," << fmt_double(x);
    nodes << "\n";
  }
  write_file((fs::path(dir) / "nodes.csv").string(), nodes.str());

  for (int r = 0; r < g.num_relations(); ++r) {
    std::ostringstream es;
    es << "src,dst\n";
    for (auto [u, v] : g.relations[static_cast<size_t>(r)].edges()) es << u << "," << v << "\n";
    std::string name = g.relation_names[static_cast<size_t>(r)];
    write_file((fs::path(dir) / ("edges_" + name + ".csv")).string(), es.str());
  }
}

std::vector<std::string> list_edge_files(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("edges_", 0) == 0 && name.size() > 10 &&
        name.substr(name.size() - 4) == ".csv")
      files.push_back(name);
  }
  std::sort(files.begin(), files.end());
  return files;
}

MultiRelationGraph load_graph_csv(const std::string& dir) {
  NodeTable nodes = load_nodes((fs::path(dir) / "nodes.csv").string());
  auto files = list_edge_files(dir);
  if (files.empty()) throw IngestError("no edges_*.csv files in " + dir);
  std::vector<RelationEdgeList> lists;
  std::vector<std::string> names;
  for (size_t r = 0; r < files.size(); ++r) {
    std::string name = files[r].substr(6, files[r].size() - 10);
    lists.push_back(load_relation_edges((fs::path(dir) / files[r]).string(),
                                        static_cast<int>(r), nodes.num_nodes, name));
    names.push_back(name);
  }
  return assemble(std::move(nodes), std::move(lists), std::move(names));
}

}  // namespace hagnn
