#include "hagnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace hagnn {

namespace {

thread_local int no_grad_depth = 0;

void check_finite(const std::vector<double>& v, const char* op) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericError(std::string("non-finite value produced by ") + op);
}

bool any_requires(const std::vector<std::shared_ptr<TensorNode>>& inputs) {
  for (const auto& in : inputs)
    if (in->requires_grad) return true;
  return false;
}

std::shared_ptr<TensorNode> make_node(int rows, int cols, std::vector<double> values,
                                      std::vector<std::shared_ptr<TensorNode>> inputs,
                                      const char* op) {
  check_finite(values, op);
  auto n = std::make_shared<TensorNode>();
  n->rows = rows;
  n->cols = cols;
  n->values = std::move(values);
  if (no_grad_depth == 0) {
    n->inputs = std::move(inputs);
    n->requires_grad = any_requires(n->inputs);
  }
  n->op = op;
  return n;
}

void axpy(std::vector<double>& dst, double a, const double* src, size_t n, size_t dst_off = 0) {
  for (size_t i = 0; i < n; ++i) dst[dst_off + i] += a * src[i];
}

double act_value(double x, Activation kind) {
  switch (kind) {
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::LeakyRelu:
      return x > 0.0 ? x : kLeakySlope * x;
    case Activation::Sigmoid:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  return 0.0;
}

double act_deriv_from_preact(double x, Activation kind) {
  switch (kind) {
    case Activation::Tanh: {
      double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::LeakyRelu:
      return x > 0.0 ? 1.0 : kLeakySlope;
    case Activation::Sigmoid: {
      double s = act_value(x, Activation::Sigmoid);
      return s * (1.0 - s);
    }
  }
  return 0.0;
}

void require_shape(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "leaky_relu") return Activation::LeakyRelu;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw ConfigError("unknown activation: " + name);
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh:
      return "tanh";
    case Activation::LeakyRelu:
      return "leaky_relu";
    case Activation::Sigmoid:
      return "sigmoid";
  }
  return "?";
}

// ---- Tensor ------------------------------------------------------------------

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
  return from_values(rows, cols, std::vector<double>(static_cast<size_t>(rows) * cols, 0.0),
                     requires_grad);
}

Tensor Tensor::from_values(int rows, int cols, std::vector<double> values, bool requires_grad) {
  require_shape(rows >= 0 && cols >= 0 &&
                    values.size() == static_cast<size_t>(rows) * static_cast<size_t>(cols),
                "tensor shape does not match value count");
  check_finite(values, "from_values");
  auto n = std::make_shared<TensorNode>();
  n->rows = rows;
  n->cols = cols;
  n->values = std::move(values);
  n->requires_grad = requires_grad;
  if (requires_grad) n->grad.assign(n->values.size(), 0.0);
  return Tensor(std::move(n));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return from_values(1, 1, {v}, requires_grad);
}

double Tensor::item() const {
  require_shape(size() == 1, "item() requires a 1x1 tensor");
  return node_->values[0];
}

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

// ---- backward ----------------------------------------------------------------

ComputationRecord ComputationRecord::build(const Tensor& root) {
  ComputationRecord rec;
  rec.root_ = root.node();
  if (!rec.root_->requires_grad) return rec;

  // Iterative post-order DFS over requires_grad nodes.
  std::unordered_set<TensorNode*> visited;
  std::vector<std::pair<std::shared_ptr<TensorNode>, size_t>> stack;
  stack.emplace_back(rec.root_, 0);
  visited.insert(rec.root_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      auto in = node->inputs[next++];
      if (in->requires_grad && !visited.count(in.get())) {
        visited.insert(in.get());
        stack.emplace_back(std::move(in), 0);
      }
    } else {
      rec.order_.push_back(node);
      stack.pop_back();
    }
  }
  return rec;
}

void ComputationRecord::backward() {
  if (!root_) return;
  require_shape(root_->values.size() == 1, "backward requires a scalar (1x1) loss");
  if (!root_->requires_grad) return;
  for (auto& n : order_) {
    if (n->is_leaf()) {
      if (n->grad.empty()) n->grad.assign(n->values.size(), 0.0);
    } else {
      n->grad.assign(n->values.size(), 0.0);
    }
  }
  root_->grad[0] += 1.0;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it)
    if ((*it)->backward) (*it)->backward(**it);
}

void backward(const Tensor& loss) { ComputationRecord::build(loss).backward(); }

NoGradGuard::NoGradGuard() { ++no_grad_depth; }
NoGradGuard::~NoGradGuard() { --no_grad_depth; }
bool grad_enabled() { return no_grad_depth == 0; }

// ---- elementwise / structural ops ---------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  auto n = make_node(a.rows(), a.cols(), std::move(out), {a.node(), b.node()}, "add");
  if (n->requires_grad)
    n->backward = [](TensorNode& self) {
      for (int k = 0; k < 2; ++k) {
        auto& in = self.inputs[static_cast<size_t>(k)];
        if (in->requires_grad) axpy(in->grad, 1.0, self.grad.data(), self.grad.size());
      }
    };
  return Tensor(n);
}

Tensor scale(const Tensor& x, double c) {
  std::vector<double> out(x.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = c * x.values()[i];
  auto n = make_node(x.rows(), x.cols(), std::move(out), {x.node()}, "scale");
  if (n->requires_grad)
    n->backward = [c](TensorNode& self) {
      auto& in = self.inputs[0];
      if (in->requires_grad) axpy(in->grad, c, self.grad.data(), self.grad.size());
    };
  return Tensor(n);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_shape(a.cols() == b.rows(), "matmul: inner dimensions disagree");
  const int n = a.rows(), k = a.cols(), m = b.cols();
  std::vector<double> out(static_cast<size_t>(n) * m, 0.0);
  const auto& av = a.values();
  const auto& bv = b.values();
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < k; ++p) {
      double aip = av[static_cast<size_t>(i) * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv.data() + static_cast<size_t>(p) * m;
      double* orow = out.data() + static_cast<size_t>(i) * m;
      for (int j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  auto node = make_node(n, m, std::move(out), {a.node(), b.node()}, "matmul");
  if (node->requires_grad)
    node->backward = [n, k, m](TensorNode& self) {
      auto& A = self.inputs[0];
      auto& B = self.inputs[1];
      if (A->requires_grad) {  // dA = dY * B^T
        for (int i = 0; i < n; ++i)
          for (int p = 0; p < k; ++p) {
            const double* gy = self.grad.data() + static_cast<size_t>(i) * m;
            const double* brow = B->values.data() + static_cast<size_t>(p) * m;
            double acc = 0.0;
            for (int j = 0; j < m; ++j) acc += gy[j] * brow[j];
            A->grad[static_cast<size_t>(i) * k + p] += acc;
          }
      }
      if (B->requires_grad) {  // dB = A^T * dY
        for (int i = 0; i < n; ++i)
          for (int p = 0; p < k; ++p) {
            double aip = A->values[static_cast<size_t>(i) * k + p];
            if (aip == 0.0) continue;
            axpy(B->grad, aip, self.grad.data() + static_cast<size_t>(i) * m,
                 static_cast<size_t>(m), static_cast<size_t>(p) * m);
          }
      }
    };
  return Tensor(node);
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_shape(x.cols() == w.cols(), "linear: input width does not match weight");
  require_shape(b.rows() == w.rows() && b.cols() == 1, "linear: bias shape mismatch");
  const int n = x.rows(), din = x.cols(), dout = w.rows();
  std::vector<double> out(static_cast<size_t>(n) * dout);
  for (int i = 0; i < n; ++i) {
    const double* xrow = x.values().data() + static_cast<size_t>(i) * din;
    for (int o = 0; o < dout; ++o) {
      const double* wrow = w.values().data() + static_cast<size_t>(o) * din;
      double acc = b.values()[static_cast<size_t>(o)];
      for (int p = 0; p < din; ++p) acc += xrow[p] * wrow[p];
      out[static_cast<size_t>(i) * dout + o] = acc;
    }
  }
  auto node = make_node(n, dout, std::move(out), {x.node(), w.node(), b.node()}, "linear");
  if (node->requires_grad)
    node->backward = [n, din, dout](TensorNode& self) {
      auto& X = self.inputs[0];
      auto& W = self.inputs[1];
      auto& B = self.inputs[2];
      for (int i = 0; i < n; ++i) {
        const double* gy = self.grad.data() + static_cast<size_t>(i) * dout;
        const double* xrow = X->values.data() + static_cast<size_t>(i) * din;
        for (int o = 0; o < dout; ++o) {
          double g = gy[o];
          if (g == 0.0) continue;
          if (X->requires_grad)
            axpy(X->grad, g, W->values.data() + static_cast<size_t>(o) * din,
                 static_cast<size_t>(din), static_cast<size_t>(i) * din);
          if (W->requires_grad)
            axpy(W->grad, g, xrow, static_cast<size_t>(din), static_cast<size_t>(o) * din);
          if (B->requires_grad) B->grad[static_cast<size_t>(o)] += g;
        }
      }
    };
  return Tensor(node);
}

Tensor add_rowvec(const Tensor& x, const Tensor& b) {
  require_shape(b.cols() == 1 && b.rows() == x.cols(), "add_rowvec: bias shape mismatch");
  const int n = x.rows(), d = x.cols();
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      out[static_cast<size_t>(i) * d + j] =
          x.values()[static_cast<size_t>(i) * d + j] + b.values()[static_cast<size_t>(j)];
  auto node = make_node(n, d, std::move(out), {x.node(), b.node()}, "add_rowvec");
  if (node->requires_grad)
    node->backward = [n, d](TensorNode& self) {
      auto& X = self.inputs[0];
      auto& B = self.inputs[1];
      if (X->requires_grad) axpy(X->grad, 1.0, self.grad.data(), self.grad.size());
      if (B->requires_grad)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j)
            B->grad[static_cast<size_t>(j)] += self.grad[static_cast<size_t>(i) * d + j];
    };
  return Tensor(node);
}

Tensor transpose(const Tensor& x) {
  const int n = x.rows(), m = x.cols();
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      out[static_cast<size_t>(j) * n + i] = x.values()[static_cast<size_t>(i) * m + j];
  auto node = make_node(m, n, std::move(out), {x.node()}, "transpose");
  if (node->requires_grad)
    node->backward = [n, m](TensorNode& self) {
      auto& X = self.inputs[0];
      if (!X->requires_grad) return;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
          X->grad[static_cast<size_t>(i) * m + j] += self.grad[static_cast<size_t>(j) * n + i];
    };
  return Tensor(node);
}

Tensor activation(const Tensor& x, Activation kind) {
  std::vector<double> out(x.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = act_value(x.values()[i], kind);
  auto node = make_node(x.rows(), x.cols(), std::move(out), {x.node()}, "activation");
  if (node->requires_grad)
    node->backward = [kind](TensorNode& self) {
      auto& X = self.inputs[0];
      if (!X->requires_grad) return;
      for (size_t i = 0; i < self.values.size(); ++i) {
        double d;
        switch (kind) {
          case Activation::Tanh:
            d = 1.0 - self.values[i] * self.values[i];
            break;
          case Activation::Sigmoid:
            d = self.values[i] * (1.0 - self.values[i]);
            break;
          default:
            d = X->values[i] > 0.0 ? 1.0 : kLeakySlope;
        }
        X->grad[i] += d * self.grad[i];
      }
    };
  return Tensor(node);
}

Tensor masked_softmax(const Tensor& x, const std::vector<int>& mask_in) {
  require_shape(x.cols() == 1, "masked_softmax: expects a column vector");
  if (mask_in.empty()) throw std::invalid_argument("masked_softmax: empty mask");
  std::vector<int> mask = mask_in;
  std::sort(mask.begin(), mask.end());
  mask.erase(std::unique(mask.begin(), mask.end()), mask.end());
  for (int i : mask)
    require_shape(i >= 0 && i < x.rows(), "masked_softmax: mask index out of range");

  std::vector<double> out(x.size(), 0.0);
  double mx = -std::numeric_limits<double>::infinity();
  for (int i : mask) mx = std::max(mx, x.values()[static_cast<size_t>(i)]);
  double sum = 0.0;
  for (int i : mask) {
    double w = std::exp(x.values()[static_cast<size_t>(i)] - mx);
    out[static_cast<size_t>(i)] = w;
    sum += w;
  }
  for (int i : mask) out[static_cast<size_t>(i)] /= sum;

  auto node = make_node(x.rows(), 1, std::move(out), {x.node()}, "masked_softmax");
  if (node->requires_grad)
    node->backward = [mask](TensorNode& self) {
      auto& X = self.inputs[0];
      if (!X->requires_grad) return;
      double inner = 0.0;
      for (int i : mask)
        inner += self.values[static_cast<size_t>(i)] * self.grad[static_cast<size_t>(i)];
      for (int i : mask)
        X->grad[static_cast<size_t>(i)] +=
            self.values[static_cast<size_t>(i)] * (self.grad[static_cast<size_t>(i)] - inner);
    };
  return Tensor(node);
}

Tensor softmax_rows(const Tensor& x) {
  const int n = x.rows(), m = x.cols();
  require_shape(m >= 1, "softmax_rows: empty rows");
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    const double* row = x.values().data() + static_cast<size_t>(i) * m;
    double* orow = out.data() + static_cast<size_t>(i) * m;
    double mx = row[0];
    for (int j = 1; j < m; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
      orow[j] = std::exp(row[j] - mx);
      sum += orow[j];
    }
    for (int j = 0; j < m; ++j) orow[j] /= sum;
  }
  auto node = make_node(n, m, std::move(out), {x.node()}, "softmax_rows");
  if (node->requires_grad)
    node->backward = [n, m](TensorNode& self) {
      auto& X = self.inputs[0];
      if (!X->requires_grad) return;
      for (int i = 0; i < n; ++i) {
        const double* y = self.values.data() + static_cast<size_t>(i) * m;
        const double* g = self.grad.data() + static_cast<size_t>(i) * m;
        double inner = 0.0;
        for (int j = 0; j < m; ++j) inner += y[j] * g[j];
        for (int j = 0; j < m; ++j)
          X->grad[static_cast<size_t>(i) * m + j] += y[j] * (g[j] - inner);
      }
    };
  return Tensor(node);
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  require_shape(!parts.empty(), "concat_rows: no parts");
  const int m = parts[0].cols();
  int total = 0;
  std::vector<std::shared_ptr<TensorNode>> inputs;
  for (const auto& p : parts) {
    require_shape(p.cols() == m, "concat_rows: column mismatch");
    total += p.rows();
    inputs.push_back(p.node());
  }
  std::vector<double> out;
  out.reserve(static_cast<size_t>(total) * m);
  for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  auto node = make_node(total, m, std::move(out), std::move(inputs), "concat_rows");
  if (node->requires_grad)
    node->backward = [](TensorNode& self) {
      size_t off = 0;
      for (auto& in : self.inputs) {
        if (in->requires_grad) axpy(in->grad, 1.0, self.grad.data() + off, in->values.size());
        off += in->values.size();
      }
    };
  return Tensor(node);
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  require_shape(!parts.empty(), "concat_cols: no parts");
  const int n = parts[0].rows();
  int total = 0;
  std::vector<std::shared_ptr<TensorNode>> inputs;
  for (const auto& p : parts) {
    require_shape(p.rows() == n, "concat_cols: row mismatch");
    total += p.cols();
    inputs.push_back(p.node());
  }
  std::vector<double> out(static_cast<size_t>(n) * total);
  int col0 = 0;
  for (const auto& p : parts) {
    const int pc = p.cols();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < pc; ++j)
        out[static_cast<size_t>(i) * total + col0 + j] =
            p.values()[static_cast<size_t>(i) * pc + j];
    col0 += pc;
  }
  auto node = make_node(n, total, std::move(out), std::move(inputs), "concat_cols");
  if (node->requires_grad)
    node->backward = [n, total](TensorNode& self) {
      int col0 = 0;
      for (auto& in : self.inputs) {
        const int pc = in->cols;
        if (in->requires_grad)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < pc; ++j)
              in->grad[static_cast<size_t>(i) * pc + j] +=
                  self.grad[static_cast<size_t>(i) * total + col0 + j];
        col0 += pc;
      }
    };
  return Tensor(node);
}

Tensor slice_rows(const Tensor& x, int row_begin, int row_end) {
  require_shape(0 <= row_begin && row_begin < row_end && row_end <= x.rows(),
                "slice_rows: bad range");
  const int m = x.cols(), n = row_end - row_begin;
  std::vector<double> out(x.values().begin() + static_cast<size_t>(row_begin) * m,
                          x.values().begin() + static_cast<size_t>(row_end) * m);
  auto node = make_node(n, m, std::move(out), {x.node()}, "slice_rows");
  if (node->requires_grad)
    node->backward = [row_begin, m](TensorNode& self) {
      auto& X = self.inputs[0];
      if (!X->requires_grad) return;
      axpy(X->grad, 1.0, self.grad.data(), self.grad.size(),
           static_cast<size_t>(row_begin) * m);
    };
  return Tensor(node);
}

Tensor slice_col(const Tensor& x, int col) {
  require_shape(0 <= col && col < x.cols(), "slice_col: bad column");
  const int n = x.rows(), m = x.cols();
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = x.values()[static_cast<size_t>(i) * m + col];
  auto node = make_node(n, 1, std::move(out), {x.node()}, "slice_col");
  if (node->requires_grad)
    node->backward = [col, n, m](TensorNode& self) {
      auto& X = self.inputs[0];
      if (!X->requires_grad) return;
      for (int i = 0; i < n; ++i)
        X->grad[static_cast<size_t>(i) * m + col] += self.grad[static_cast<size_t>(i)];
    };
  return Tensor(node);
}

Tensor weighted_sum(const std::vector<Tensor>& parts, const Tensor& weights) {
  require_shape(!parts.empty(), "weighted_sum: no parts");
  require_shape(weights.cols() == 1 && weights.rows() == static_cast<int>(parts.size()),
                "weighted_sum: weights length must equal part count");
  const int n = parts[0].rows(), m = parts[0].cols();
  std::vector<std::shared_ptr<TensorNode>> inputs{weights.node()};
  for (const auto& p : parts) {
    require_shape(p.rows() == n && p.cols() == m, "weighted_sum: part shape mismatch");
    inputs.push_back(p.node());
  }
  std::vector<double> out(static_cast<size_t>(n) * m, 0.0);
  for (size_t k = 0; k < parts.size(); ++k)
    axpy(out, weights.values()[k], parts[k].values().data(), out.size());
  auto node = make_node(n, m, std::move(out), std::move(inputs), "weighted_sum");
  if (node->requires_grad)
    node->backward = [](TensorNode& self) {
      auto& W = self.inputs[0];
      for (size_t k = 1; k < self.inputs.size(); ++k) {
        auto& P = self.inputs[k];
        double wk = W->values[k - 1];
        if (P->requires_grad) axpy(P->grad, wk, self.grad.data(), self.grad.size());
        if (W->requires_grad) {
          double acc = 0.0;
          for (size_t i = 0; i < self.grad.size(); ++i) acc += self.grad[i] * P->values[i];
          W->grad[k - 1] += acc;
        }
      }
    };
  return Tensor(node);
}

Tensor scale_rows(const Tensor& x, const Tensor& c) {
  require_shape(c.cols() == 1 && c.rows() == x.rows(), "scale_rows: scale shape mismatch");
  const int n = x.rows(), m = x.cols();
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    double ci = c.values()[static_cast<size_t>(i)];
    for (int j = 0; j < m; ++j)
      out[static_cast<size_t>(i) * m + j] = ci * x.values()[static_cast<size_t>(i) * m + j];
  }
  auto node = make_node(n, m, std::move(out), {x.node(), c.node()}, "scale_rows");
  if (node->requires_grad)
    node->backward = [n, m](TensorNode& self) {
      auto& X = self.inputs[0];
      auto& C = self.inputs[1];
      for (int i = 0; i < n; ++i) {
        double ci = C->values[static_cast<size_t>(i)];
        const double* g = self.grad.data() + static_cast<size_t>(i) * m;
        if (X->requires_grad)
          axpy(X->grad, ci, g, static_cast<size_t>(m), static_cast<size_t>(i) * m);
        if (C->requires_grad) {
          double acc = 0.0;
          const double* xr = X->values.data() + static_cast<size_t>(i) * m;
          for (int j = 0; j < m; ++j) acc += g[j] * xr[j];
          C->grad[static_cast<size_t>(i)] += acc;
        }
      }
    };
  return Tensor(node);
}

Tensor sum_all(const Tensor& x) {
  double s = 0.0;
  for (double v : x.values()) s += v;
  auto node = make_node(1, 1, {s}, {x.node()}, "sum_all");
  if (node->requires_grad)
    node->backward = [](TensorNode& self) {
      auto& X = self.inputs[0];
      if (X->requires_grad)
        for (auto& g : X->grad) g += self.grad[0];
    };
  return Tensor(node);
}

Tensor mean_all(const Tensor& x) {
  require_shape(x.size() > 0, "mean_all: empty tensor");
  double s = 0.0;
  for (double v : x.values()) s += v;
  const double inv = 1.0 / static_cast<double>(x.size());
  auto node = make_node(1, 1, {s * inv}, {x.node()}, "mean_all");
  if (node->requires_grad)
    node->backward = [inv](TensorNode& self) {
      auto& X = self.inputs[0];
      if (X->requires_grad)
        for (auto& g : X->grad) g += self.grad[0] * inv;
    };
  return Tensor(node);
}

Tensor dot(const Tensor& a, const Tensor& b) {
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "dot: shape mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a.values()[i] * b.values()[i];
  auto node = make_node(1, 1, {s}, {a.node(), b.node()}, "dot");
  if (node->requires_grad)
    node->backward = [](TensorNode& self) {
      auto& A = self.inputs[0];
      auto& B = self.inputs[1];
      if (A->requires_grad) axpy(A->grad, self.grad[0], B->values.data(), B->values.size());
      if (B->requires_grad) axpy(B->grad, self.grad[0], A->values.data(), A->values.size());
    };
  return Tensor(node);
}

// ---- sparse ops ----------------------------------------------------------------

Tensor sparse_matmul(const SparseMatrix& s, const Tensor& x) {
  require_shape(s.size() == x.rows(), "sparse_matmul: dimension mismatch");
  const int n = s.size(), d = x.cols();
  std::vector<double> out(static_cast<size_t>(n) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j : s.row(i))
      axpy(out, 1.0, x.values().data() + static_cast<size_t>(j) * d, static_cast<size_t>(d),
           static_cast<size_t>(i) * d);
  auto node = make_node(n, d, std::move(out), {x.node()}, "sparse_matmul");
  if (node->requires_grad) {
    const SparseMatrix* sp = &s;  // caller keeps the graph alive during backward
    node->backward = [sp, n, d](TensorNode& self) {
      auto& X = self.inputs[0];
      if (!X->requires_grad) return;
      for (int i = 0; i < n; ++i)
        for (int j : sp->row(i))
          axpy(X->grad, 1.0, self.grad.data() + static_cast<size_t>(i) * d,
               static_cast<size_t>(d), static_cast<size_t>(j) * d);
    };
  }
  return Tensor(node);
}

Tensor relation_mix(const Tensor& beta, std::span<const SparseMatrix> relations,
                    const Tensor& x) {
  require_shape(beta.cols() == 1 && beta.rows() == static_cast<int>(relations.size()),
                "relation_mix: beta length must equal relation count");
  const int n = x.rows(), d = x.cols();
  for (const auto& rel : relations)
    require_shape(rel.size() == n, "relation_mix: relation dimension mismatch");

  // Save M_r = A^r * X for the beta gradient.
  std::vector<std::vector<double>> mixed;
  mixed.reserve(relations.size());
  std::vector<double> out(static_cast<size_t>(n) * d, 0.0);
  for (size_t r = 0; r < relations.size(); ++r) {
    std::vector<double> m(static_cast<size_t>(n) * d, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j : relations[r].row(i))
        axpy(m, 1.0, x.values().data() + static_cast<size_t>(j) * d, static_cast<size_t>(d),
             static_cast<size_t>(i) * d);
    axpy(out, beta.values()[r], m.data(), out.size());
    mixed.push_back(std::move(m));
  }
  auto node = make_node(n, d, std::move(out), {beta.node(), x.node()}, "relation_mix");
  if (node->requires_grad) {
    std::vector<const SparseMatrix*> rels;
    for (const auto& rel : relations) rels.push_back(&rel);
    std::vector<double> beta_vals = beta.values();
    node->backward = [rels, mixed = std::move(mixed), beta_vals, n, d](TensorNode& self) {
      auto& B = self.inputs[0];
      auto& X = self.inputs[1];
      if (B->requires_grad)
        for (size_t r = 0; r < rels.size(); ++r) {
          double acc = 0.0;
          for (size_t i = 0; i < self.grad.size(); ++i) acc += self.grad[i] * mixed[r][i];
          B->grad[r] += acc;
        }
      if (X->requires_grad)
        for (size_t r = 0; r < rels.size(); ++r)
          for (int i = 0; i < n; ++i)
            for (int j : rels[r]->row(i))
              axpy(X->grad, beta_vals[r], self.grad.data() + static_cast<size_t>(i) * d,
                   static_cast<size_t>(d), static_cast<size_t>(j) * d);
    };
  }
  return Tensor(node);
}

Tensor sparse_mix_dense(const Tensor& beta, std::span<const SparseMatrix> relations) {
  require_shape(beta.cols() == 1 && beta.rows() == static_cast<int>(relations.size()),
                "sparse_mix_dense: beta length must equal relation count");
  require_shape(!relations.empty(), "sparse_mix_dense: no relations");
  const int n = relations[0].size();
  std::vector<double> out(static_cast<size_t>(n) * n, 0.0);
  for (size_t r = 0; r < relations.size(); ++r) {
    double br = beta.values()[r];
    for (int i = 0; i < n; ++i)
      for (int j : relations[r].row(i)) out[static_cast<size_t>(i) * n + j] += br;
  }
  auto node = make_node(n, n, std::move(out), {beta.node()}, "sparse_mix_dense");
  if (node->requires_grad) {
    std::vector<const SparseMatrix*> rels;
    for (const auto& rel : relations) rels.push_back(&rel);
    node->backward = [rels, n](TensorNode& self) {
      auto& B = self.inputs[0];
      if (!B->requires_grad) return;
      for (size_t r = 0; r < rels.size(); ++r) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j : rels[r]->row(i)) acc += self.grad[static_cast<size_t>(i) * n + j];
        B->grad[r] += acc;
      }
    };
  }
  return Tensor(node);
}

Tensor neighbor_attention(const Tensor& v, const Tensor& s_dst, const Tensor& s_src,
                          const NeighborList& nb, Activation score_act) {
  const int n = v.rows(), d = v.cols();
  require_shape(nb.size() == n, "neighbor_attention: neighbor list size mismatch");
  require_shape(s_dst.rows() == n && s_dst.cols() == 1, "neighbor_attention: s_dst shape");
  require_shape(s_src.rows() == n && s_src.cols() == 1, "neighbor_attention: s_src shape");

  std::vector<double> alpha(static_cast<size_t>(nb.total()));
  std::vector<double> out(static_cast<size_t>(n) * d, 0.0);
  {
    size_t off = 0;
    for (int i = 0; i < n; ++i) {
      auto neigh = nb.neighbors(i);
      double sd = s_dst.values()[static_cast<size_t>(i)];
      double mx = -std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < neigh.size(); ++k) {
        double e = act_value(sd + s_src.values()[static_cast<size_t>(neigh[k])], score_act);
        alpha[off + k] = e;
        mx = std::max(mx, e);
      }
      double sum = 0.0;
      for (size_t k = 0; k < neigh.size(); ++k) {
        alpha[off + k] = std::exp(alpha[off + k] - mx);
        sum += alpha[off + k];
      }
      double* orow = out.data() + static_cast<size_t>(i) * d;
      for (size_t k = 0; k < neigh.size(); ++k) {
        alpha[off + k] /= sum;
        const double* vrow = v.values().data() + static_cast<size_t>(neigh[k]) * d;
        for (int c = 0; c < d; ++c) orow[c] += alpha[off + k] * vrow[c];
      }
      off += neigh.size();
    }
  }

  auto node = make_node(n, d, std::move(out), {v.node(), s_dst.node(), s_src.node()},
                        "neighbor_attention");
  if (node->requires_grad) {
    const NeighborList* nbp = &nb;  // caller keeps neighborhoods alive during backward
    node->backward = [nbp, alpha = std::move(alpha), score_act, n, d](TensorNode& self) {
      auto& V = self.inputs[0];
      auto& SD = self.inputs[1];
      auto& SS = self.inputs[2];
      std::vector<double> dalpha;
      size_t off = 0;
      for (int i = 0; i < n; ++i) {
        auto neigh = nbp->neighbors(i);
        const double* u = self.grad.data() + static_cast<size_t>(i) * d;
        dalpha.assign(neigh.size(), 0.0);
        double inner = 0.0;
        for (size_t k = 0; k < neigh.size(); ++k) {
          const double* vrow = V->values.data() + static_cast<size_t>(neigh[k]) * d;
          double acc = 0.0;
          for (int c = 0; c < d; ++c) acc += u[c] * vrow[c];
          dalpha[k] = acc;
          inner += alpha[off + k] * acc;
          if (V->requires_grad)
            axpy(V->grad, alpha[off + k], u, static_cast<size_t>(d),
                 static_cast<size_t>(neigh[k]) * d);
        }
        if (SD->requires_grad || SS->requires_grad) {
          double sd = SD->values[static_cast<size_t>(i)];
          for (size_t k = 0; k < neigh.size(); ++k) {
            double delta = alpha[off + k] * (dalpha[k] - inner);
            double t = sd + SS->values[static_cast<size_t>(neigh[k])];
            double dt = delta * act_deriv_from_preact(t, score_act);
            if (SD->requires_grad) SD->grad[static_cast<size_t>(i)] += dt;
            if (SS->requires_grad) SS->grad[static_cast<size_t>(neigh[k])] += dt;
          }
        }
        off += neigh.size();
      }
    };
  }
  return Tensor(node);
}

namespace {
constexpr double kLo = 1e-7;
constexpr double kHi = 1.0 - 1e-7;
}  // namespace

Tensor class_balanced_loss(const Tensor& probs, const std::vector<int>& legit_nodes,
                           const std::vector<int>& fraud_nodes, double lambda) {
  require_shape(probs.cols() == 1, "class_balanced_loss: probs must be a column vector");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  std::unordered_set<int> legit_set(legit_nodes.begin(), legit_nodes.end());
  for (int i : fraud_nodes)
    if (legit_set.count(i))
      throw std::invalid_argument("node " + std::to_string(i) + " in both V_l0 and V_l1");
  auto check = [&probs](int i) {
    require_shape(i >= 0 && i < probs.rows(), "class_balanced_loss: node index out of range");
    double p = probs.values()[static_cast<size_t>(i)];
    if (!(p >= 0.0 && p <= 1.0))
      throw NumericError("class_balanced_loss: probability outside [0,1]");
    return std::min(std::max(p, kLo), kHi);
  };
  double loss = 0.0;
  for (int i : legit_nodes) loss -= lambda * std::log(1.0 - check(i));
  for (int i : fraud_nodes) loss -= std::log(check(i));

  auto node = make_node(1, 1, {loss}, {probs.node()}, "class_balanced_loss");
  if (node->requires_grad)
    node->backward = [legit_nodes, fraud_nodes, lambda](TensorNode& self) {
      auto& P = self.inputs[0];
      if (!P->requires_grad) return;
      double g = self.grad[0];
      for (int i : legit_nodes) {
        double p = P->values[static_cast<size_t>(i)];
        if (p > kLo && p < kHi) P->grad[static_cast<size_t>(i)] += g * lambda / (1.0 - p);
      }
      for (int i : fraud_nodes) {
        double p = P->values[static_cast<size_t>(i)];
        if (p > kLo && p < kHi) P->grad[static_cast<size_t>(i)] -= g / p;
      }
    };
  return Tensor(node);
}

// ---- parameter utilities --------------------------------------------------------

Tensor xavier_uniform(int rows, int cols, int fan_in, int fan_out, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(static_cast<size_t>(rows) * cols);
  for (auto& x : v) x = rng.uniform(-limit, limit);
  return Tensor::from_values(rows, cols, std::move(v), /*requires_grad=*/true);
}

void adam_step(std::vector<Tensor>& params, AdamState& state, const AdamConfig& config) {
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  require_shape(state.m.size() == params.size() && state.v.size() == params.size(),
                "adam_step: state does not match parameter list");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    require_shape(state.m[k].size() == p.size(), "adam_step: moment shape mismatch");
    const auto& g = p.grad();
    require_shape(g.size() == p.size(), "adam_step: missing gradient");
    auto& vals = p.values_mut();
    for (size_t i = 0; i < vals.size(); ++i) {
      state.m[k][i] = config.beta1 * state.m[k][i] + (1.0 - config.beta1) * g[i];
      state.v[k][i] = config.beta2 * state.v[k][i] + (1.0 - config.beta2) * g[i] * g[i];
      double mhat = state.m[k][i] / bc1;
      double vhat = state.v[k][i] / bc2;
      vals[i] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
    }
    check_finite(vals, "adam_step");
  }
}

}  // namespace hagnn
