#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hagnn/common.hpp"
#include "hagnn/graph.hpp"

namespace hagnn {

enum class Activation { Tanh, LeakyRelu, Sigmoid };

Activation parse_activation(const std::string& name);
std::string activation_name(Activation a);

constexpr double kLeakySlope = 0.2;

struct TensorNode {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
  std::vector<double> grad;  // allocated for requires_grad leaves and during backward
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> inputs;
  std::function<void(TensorNode&)> backward;
  const char* op = "leaf";

  size_t size() const { return values.size(); }
  bool is_leaf() const { return !backward; }
};

// Dense 2-D tensor of 64-bit reals with a recorded computation graph.
// Copies share the underlying node (shallow); all ops are pure.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(int rows, int cols, bool requires_grad = false);
  static Tensor from_values(int rows, int cols, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  int rows() const { return node_->rows; }
  int cols() const { return node_->cols; }
  size_t size() const { return node_->values.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  const std::vector<double>& values() const { return node_->values; }
  std::vector<double>& values_mut() { return node_->values; }
  const std::vector<double>& grad() const { return node_->grad; }
  double at(int r, int c) const { return node_->values[static_cast<size_t>(r) * node_->cols + c]; }
  double item() const;

  void zero_grad();

  std::shared_ptr<TensorNode> node() const { return node_; }
  explicit Tensor(std::shared_ptr<TensorNode> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<TensorNode> node_;
};

// Topologically ordered slice of the graph reaching `root`, restricted to
// nodes that require gradients. backward() visits each node exactly once.
class ComputationRecord {
 public:
  static ComputationRecord build(const Tensor& root);
  // Seeds d(root)=1 and accumulates into every requires_grad leaf. Repeated
  // calls accumulate additively into leaf grads.
  void backward();
  size_t node_count() const { return order_.size(); }

 private:
  std::vector<std::shared_ptr<TensorNode>> order_;  // inputs before outputs
  std::shared_ptr<TensorNode> root_;
};

// Convenience: build a record from `loss` (must be 1x1) and run it.
void backward(const Tensor& loss);

// While alive, ops produce plain values: no backward rules are recorded and
// outputs never require gradients. Used for evaluation-only forward passes.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};
bool grad_enabled();

// ---- operations ------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor matmul(const Tensor& a, const Tensor& b);
// x (n x d_in) * W^T (d_out x d_in) + b (d_out x 1) broadcast over rows.
Tensor linear(const Tensor& x, const Tensor& W, const Tensor& b);
// X + row-broadcast of b (d x 1).
Tensor add_rowvec(const Tensor& x, const Tensor& b);
Tensor transpose(const Tensor& x);
Tensor activation(const Tensor& x, Activation kind);
Tensor scale(const Tensor& x, double c);
// x must be a column vector; entries outside mask are exactly zero, entries
// inside form a probability vector (max-subtracted for stability).
Tensor masked_softmax(const Tensor& x, const std::vector<int>& mask);
Tensor softmax_rows(const Tensor& x);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_rows(const Tensor& x, int row_begin, int row_end);
Tensor slice_col(const Tensor& x, int col);
// sum_k weights[k] * parts[k]; weights is a k x 1 tensor.
Tensor weighted_sum(const std::vector<Tensor>& parts, const Tensor& weights);
// Row i of x scaled by c[i]; c is n x 1.
Tensor scale_rows(const Tensor& x, const Tensor& c);
Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);
Tensor dot(const Tensor& a, const Tensor& b);

// Y = S * X for a constant sparse adjacency S (N x N) and X (N x d).
Tensor sparse_matmul(const SparseMatrix& s, const Tensor& x);
// Y = sum_r beta[r] * (A^r * X); beta is R x 1.
Tensor relation_mix(const Tensor& beta, std::span<const SparseMatrix> relations, const Tensor& x);
// Dense N x N matrix sum_r beta[r] * A^r.
Tensor sparse_mix_dense(const Tensor& beta, std::span<const SparseMatrix> relations);

// One attention head over fixed neighborhoods, already projected:
//   score t_ij = s_dst[i] + s_src[j],  e_ij = act(t_ij)  for j in nb(i)
//   alpha_i  = softmax_j(e_ij) (max-subtracted)
//   out_i    = sum_j alpha_ij * V_j
// V is N x d; s_dst, s_src are N x 1.
Tensor neighbor_attention(const Tensor& v, const Tensor& s_dst, const Tensor& s_src,
                          const NeighborList& nb, Activation score_act);

// -lambda * sum_{i in legit} ln(1 - p_i) - sum_{i in fraud} ln(p_i) with
// p clamped to [1e-7, 1 - 1e-7]. Index sets must be disjoint.
Tensor class_balanced_loss(const Tensor& probs, const std::vector<int>& legit_nodes,
                           const std::vector<int>& fraud_nodes, double lambda);

// ---- parameter utilities -----------------------------------------------------

Tensor xavier_uniform(int rows, int cols, int fan_in, int fan_out, Rng& rng);

struct AdamConfig {
  double lr = 5e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  int64_t step = 0;
};

// Standard bias-corrected Adam; params updated in place from their grads.
void adam_step(std::vector<Tensor>& params, AdamState& state, const AdamConfig& config);

}  // namespace hagnn
