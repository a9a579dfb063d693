#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hagnn/common.hpp"

namespace hagnn {

constexpr int kLabelUnknown = -1;

// Symmetric binary adjacency in CSR form. No self-loops, columns sorted
// ascending within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  // Edges must be canonicalized (u < v), deduplicated, endpoints < n.
  static SparseMatrix from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int size() const { return n_; }
  int64_t nnz() const { return static_cast<int64_t>(cols_.size()); }
  int64_t edge_count() const { return nnz() / 2; }

  std::span<const int> row(int i) const {
    return {cols_.data() + offsets_[i], cols_.data() + offsets_[i + 1]};
  }
  int degree(int i) const { return static_cast<int>(offsets_[i + 1] - offsets_[i]); }
  bool has_edge(int i, int j) const;

  // Unique undirected edges as (u, v) with u < v, lexicographic order.
  std::vector<std::pair<int, int>> edges() const;

 private:
  int n_ = 0;
  std::vector<int64_t> offsets_;  // n_ + 1
  std::vector<int> cols_;
};

struct RelationEdgeList {
  int relation_id = 0;
  std::string name;  // e.g. "r0" or a dataset relation name
  std::vector<std::pair<int, int>> edges;  // canonical (u < v), sorted, unique
  int64_t self_pairs_dropped = 0;
  int64_t duplicates_dropped = 0;
};

// Canonicalize (min,max), drop self-pairs (counted), sort, dedup (counted).
RelationEdgeList canonicalize_edges(int relation_id, std::string name,
                                    std::vector<std::pair<int, int>> raw);

struct MultiRelationGraph {
  int num_nodes = 0;
  int feature_dim = 0;
  std::vector<SparseMatrix> relations;
  std::vector<std::string> relation_names;
  std::vector<double> features;  // num_nodes x feature_dim, row-major
  std::vector<int> labels;       // 0 legit, 1 fraud, kLabelUnknown

  int num_relations() const { return static_cast<int>(relations.size()); }
  std::span<const double> feature_row(int i) const {
    return {features.data() + static_cast<size_t>(i) * feature_dim,
            static_cast<size_t>(feature_dim)};
  }
  // Deduplicated union of all relations.
  SparseMatrix union_adjacency() const;
  void validate() const;  // throws IngestError on any invariant breach
};

// Union neighborhoods including self, one sorted row per node.
class NeighborList {
 public:
  NeighborList() = default;
  static NeighborList from_graph(const MultiRelationGraph& g);
  static NeighborList from_union(const SparseMatrix& u);

  int size() const { return n_; }
  std::span<const int> neighbors(int i) const {
    return {ids_.data() + offsets_[i], ids_.data() + offsets_[i + 1]};
  }
  int64_t total() const { return static_cast<int64_t>(ids_.size()); }

 private:
  int n_ = 0;
  std::vector<int64_t> offsets_;
  std::vector<int> ids_;
};

// ---- ingestion ----------------------------------------------------------

struct NodeTable {
  std::vector<double> features;  // N x d
  std::vector<int> labels;
  int num_nodes = 0;
  int feature_dim = 0;
};

// CSV `id,label,f0..f{d-1}`; ids contiguous 0..N-1 in order, label empty for
// unlabeled nodes. Throws IngestError naming the offending line.
NodeTable load_nodes(const std::string& path);

// CSV `src,dst`. Canonicalizes, dedups, drops self-pairs with a count.
RelationEdgeList load_relation_edges(const std::string& path, int relation_id,
                                     int num_nodes, std::string name = "");

struct EventTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::optional<int> column_index(const std::string& name) const;
};

EventTable load_event_table(const std::string& path);

struct CliqueRule {
  std::string node_column;               // column holding node ids
  std::vector<std::string> key_columns;  // group-by keys, all must match
};

// Parse "node_col:key1+key2" into a rule. Empty key part is an error.
CliqueRule parse_clique_rule(const std::string& text);

struct CliqueBuildReport {
  int64_t groups = 0;
  int64_t capped_groups = 0;     // groups larger than the cap, subsampled
  int64_t subsampled_pairs = 0;  // pairs drawn from capped groups
};

// Group rows by the rule's key columns and connect all node pairs within a
// group. Groups with more than `cap` members contribute cap*(cap-1)/2
// seeded random pairs instead of the full clique.
RelationEdgeList build_relations_from_events(const EventTable& table, const CliqueRule& rule,
                                             int relation_id, int num_nodes, int cap,
                                             Rng rng, CliqueBuildReport* report = nullptr);

MultiRelationGraph assemble(NodeTable nodes, std::vector<RelationEdgeList> edge_lists,
                            std::vector<std::string> relation_names = {});

// Dense binary row a_i^r.
std::vector<double> adjacency_row(const MultiRelationGraph& g, int relation, int node);

// Union of node i's neighbors over all relations, plus i, ascending.
std::vector<int> neighbor_union(const MultiRelationGraph& g, int node);

// ---- synthetic graphs ----------------------------------------------------

struct SynthConfig {
  int num_nodes = 1000;
  double fraud_fraction = 0.10;
  int num_relations = 3;
  // Intra-class edge probability per relation; last value repeats if the
  // list is shorter than num_relations.
  std::vector<double> edge_prob = {0.002, 0.0015, 0.001};
  // Fraud-fraud pairs use edge_prob * fraud_density (fraudsters cluster
  // densely; the default roughly matches expected degrees across classes so
  // degree alone does not give fraudsters away).
  double fraud_density = 9.0;
  double camouflage_rate = 0.3;          // P(fraud-fraud edge rewired to a legit end)
  int feature_dim = 16;
  double feature_camouflage_rate = 0.3;  // P(fraudster draws legit-style features)
  double feature_shift = 0.6;            // mean offset of the fraud feature Gaussian
  uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

MultiRelationGraph generate_synthetic(const SynthConfig& config);

// The desk-scale benchmark: 1,000 nodes, 3 relations, 10% fraud,
// camouflage 0.3/0.3.
SynthConfig benchmark_config(uint64_t seed);

// ---- splits ---------------------------------------------------------------

struct DatasetSplit {
  std::vector<int> train_nodes;  // labeled nodes in train, ascending
  std::vector<int> test_nodes;   // labeled nodes in test, ascending
  std::vector<int> train_legit;  // V_l0
  std::vector<int> train_fraud;  // V_l1

  uint64_t hash() const;
};

// Stratified by class over the labeled nodes; round-half-up per class.
DatasetSplit split_nodes(const MultiRelationGraph& g, double train_fraction, Rng rng);

// ---- file I/O for the documented dataset layout ---------------------------

// Writes nodes.csv and edges_<name>.csv per relation into dir.
void write_graph_csv(const MultiRelationGraph& g, const std::string& dir);
// Reads nodes.csv plus every edges_*.csv (lexicographic relation order).
MultiRelationGraph load_graph_csv(const std::string& dir);
std::vector<std::string> list_edge_files(const std::string& dir);

}  // namespace hagnn
