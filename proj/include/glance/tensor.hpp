#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

namespace glance {

// Dense row-major 2-D array of 64-bit floats. Values are treated as immutable
// once an op has consumed the tensor; `grad` accumulates reverse-mode
// gradients for tensors with `requires_grad` set.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
  bool requires_grad = false;
  std::vector<double> grad;

  Tensor() = default;
  Tensor(int r, int c);

  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return values.size(); }
  std::string shape_str() const;
  bool all_finite() const;
  void ensure_grad();  // allocates a zeroed grad buffer if absent
  void zero_grad();
};

using TensorRef = std::shared_ptr<Tensor>;

TensorRef tensor(int rows, int cols);
TensorRef tensor(int rows, int cols, std::vector<double> values);
TensorRef tensor(std::initializer_list<std::initializer_list<double>> rows);
TensorRef constant(int rows, int cols, double value);
TensorRef ones(int rows, int cols);
// Leaf tensor that collects gradients.
TensorRef param(int rows, int cols, std::vector<double> values);

// Define-by-run gradient tape. Ops append a node holding the output tensor
// and a closure that pushes the output's gradient onto its parents. The
// recording order is a topological order by construction, so backward() is a
// single reverse sweep; each node runs exactly once and parent gradients
// accumulate additively.
class Tape {
 public:
  // `backward_fn` reads out->grad and accumulates into the parents' grads.
  void record(TensorRef out, std::function<void()> backward_fn);

  // Seeds `root` (must be 1x1 and gradient-tracked) with 1 and sweeps.
  void backward(const TensorRef& root);

  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    TensorRef out;
    std::function<void()> back;
  };
  std::vector<Node> nodes_;
};

// --- ops -------------------------------------------------------------------
// All ops validate shapes up front and throw validation_error naming both
// shapes on mismatch. Gradient tracking propagates from the inputs.

TensorRef matmul(Tape& tape, const TensorRef& a, const TensorRef& b);
TensorRef transpose(Tape& tape, const TensorRef& a);
TensorRef concat_cols(Tape& tape, const TensorRef& a, const TensorRef& b);
TensorRef add(Tape& tape, const TensorRef& a, const TensorRef& b);
TensorRef sub(Tape& tape, const TensorRef& a, const TensorRef& b);
TensorRef mul_elementwise(Tape& tape, const TensorRef& a, const TensorRef& b);
TensorRef scale(Tape& tape, const TensorRef& x, double factor);
TensorRef sigmoid(Tape& tape, const TensorRef& x);
TensorRef relu(Tape& tape, const TensorRef& x);  // subgradient 0 at x == 0
TensorRef softmax_rows(Tape& tape, const TensorRef& x);
TensorRef sum(Tape& tape, const TensorRef& x);   // 1x1
TensorRef mean(Tape& tape, const TensorRef& x);  // 1x1
TensorRef row_select(Tape& tape, const TensorRef& x, const std::vector<int>& indices);

// Mean over rows of -log softmax(logits)[label], stabilized by row-max
// subtraction. Labels must lie in [0, cols).
TensorRef cross_entropy(Tape& tape, const TensorRef& logits, const std::vector<int>& labels);

// --- gradient checking -----------------------------------------------------

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool ok = false;
  int worst_row = -1;
  int worst_col = -1;
  double analytic = 0.0;  // tape gradient at the worst element
  double numeric = 0.0;   // central finite difference at the worst element
};

using ScalarFn = std::function<TensorRef(Tape&, const TensorRef&)>;

// Compares the tape gradient of the scalar function f at x against central
// finite differences with the given step. Relative error uses a small floor
// so that near-zero gradients compare absolutely.
GradCheckReport grad_check(const ScalarFn& f, const Tensor& x, double step, double tol);

}  // namespace glance
