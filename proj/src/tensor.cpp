#include "glance/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "glance/error.hpp"

namespace glance {

Tensor::Tensor(int r, int c) : rows(r), cols(c) {
  if (r < 1 || c < 1) {
    throw validation_error("tensor shape must be at least 1x1, got [" + std::to_string(r) +
                           "x" + std::to_string(c) + "]");
  }
  values.assign(static_cast<std::size_t>(r) * c, 0.0);
}

std::string Tensor::shape_str() const {
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

bool Tensor::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::ensure_grad() {
  if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
}

void Tensor::zero_grad() { grad.assign(values.size(), 0.0); }

TensorRef tensor(int rows, int cols) { return std::make_shared<Tensor>(rows, cols); }

TensorRef tensor(int rows, int cols, std::vector<double> values) {
  auto t = std::make_shared<Tensor>(rows, cols);
  if (values.size() != t->size()) {
    throw validation_error("tensor " + t->shape_str() + " expects " +
                           std::to_string(t->size()) + " values, got " +
                           std::to_string(values.size()));
  }
  t->values = std::move(values);
  return t;
}

TensorRef tensor(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  auto t = std::make_shared<Tensor>(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) {
      throw validation_error("ragged initializer: row " + std::to_string(i) + " has " +
                             std::to_string(row.size()) + " values, expected " +
                             std::to_string(c));
    }
    int j = 0;
    for (double v : row) t->at(i, j++) = v;
    ++i;
  }
  return t;
}

TensorRef constant(int rows, int cols, double value) {
  auto t = std::make_shared<Tensor>(rows, cols);
  std::fill(t->values.begin(), t->values.end(), value);
  return t;
}

TensorRef ones(int rows, int cols) { return constant(rows, cols, 1.0); }

TensorRef param(int rows, int cols, std::vector<double> values) {
  auto t = tensor(rows, cols, std::move(values));
  t->requires_grad = true;
  t->ensure_grad();
  return t;
}

void Tape::record(TensorRef out, std::function<void()> backward_fn) {
  nodes_.push_back(Node{std::move(out), std::move(backward_fn)});
}

void Tape::backward(const TensorRef& root) {
  if (root->rows != 1 || root->cols != 1) {
    throw validation_error("backward root must be 1x1, got " + root->shape_str());
  }
  if (!root->requires_grad) {
    throw validation_error("backward root is not gradient-tracked");
  }
  root->ensure_grad();
  root->grad[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    it->back();
  }
}

namespace {

// Marks the output as tracked and records the closure when any input needs
// gradients. `parents_tracked` is the OR over the op's inputs.
void track(Tape& tape, const TensorRef& out, bool parents_tracked, std::function<void()> back) {
  if (!parents_tracked) return;
  out->requires_grad = true;
  out->ensure_grad();
  tape.record(out, std::move(back));
}

void check_same_shape(const char* op, const TensorRef& a, const TensorRef& b) {
  if (a->rows != b->rows || a->cols != b->cols) {
    throw validation_error(std::string(op) + ": shape mismatch " + a->shape_str() + " vs " +
                           b->shape_str());
  }
}

}  // namespace

TensorRef matmul(Tape& tape, const TensorRef& a, const TensorRef& b) {
  if (a->cols != b->rows) {
    throw validation_error("matmul: cannot multiply " + a->shape_str() + " by " +
                           b->shape_str());
  }
  const int n = a->rows, m = a->cols, k = b->cols;
  auto out = tensor(n, k);
  // i-k-j order keeps both operands streaming row-major.
  for (int i = 0; i < n; ++i) {
    const double* arow = &a->values[static_cast<std::size_t>(i) * m];
    double* orow = &out->values[static_cast<std::size_t>(i) * k];
    for (int p = 0; p < m; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = &b->values[static_cast<std::size_t>(p) * k];
      for (int j = 0; j < k; ++j) orow[j] += av * brow[j];
    }
  }
  track(tape, out, a->requires_grad || b->requires_grad, [a, b, out, n, m, k] {
    if (a->requires_grad) {
      // dL/da = g . b^T
      for (int i = 0; i < n; ++i) {
        const double* grow = &out->grad[static_cast<std::size_t>(i) * k];
        double* arow = &a->grad[static_cast<std::size_t>(i) * m];
        for (int p = 0; p < m; ++p) {
          const double* brow = &b->values[static_cast<std::size_t>(p) * k];
          double acc = 0.0;
          for (int j = 0; j < k; ++j) acc += grow[j] * brow[j];
          arow[p] += acc;
        }
      }
    }
    if (b->requires_grad) {
      // dL/db = a^T . g
      for (int i = 0; i < n; ++i) {
        const double* arow = &a->values[static_cast<std::size_t>(i) * m];
        const double* grow = &out->grad[static_cast<std::size_t>(i) * k];
        for (int p = 0; p < m; ++p) {
          const double av = arow[p];
          if (av == 0.0) continue;
          double* brow = &b->grad[static_cast<std::size_t>(p) * k];
          for (int j = 0; j < k; ++j) brow[j] += av * grow[j];
        }
      }
    }
  });
  return out;
}

TensorRef transpose(Tape& tape, const TensorRef& a) {
  auto out = tensor(a->cols, a->rows);
  for (int i = 0; i < a->rows; ++i)
    for (int j = 0; j < a->cols; ++j) out->at(j, i) = a->at(i, j);
  track(tape, out, a->requires_grad, [a, out] {
    for (int i = 0; i < a->rows; ++i)
      for (int j = 0; j < a->cols; ++j) a->grad[static_cast<std::size_t>(i) * a->cols + j] += out->grad[static_cast<std::size_t>(j) * out->cols + i];
  });
  return out;
}

TensorRef concat_cols(Tape& tape, const TensorRef& a, const TensorRef& b) {
  if (a->rows != b->rows) {
    throw validation_error("concat_cols: row mismatch " + a->shape_str() + " vs " +
                           b->shape_str());
  }
  const int n = a->rows, ca = a->cols, cb = b->cols;
  auto out = tensor(n, ca + cb);
  for (int i = 0; i < n; ++i) {
    std::copy_n(&a->values[static_cast<std::size_t>(i) * ca], ca,
                &out->values[static_cast<std::size_t>(i) * (ca + cb)]);
    std::copy_n(&b->values[static_cast<std::size_t>(i) * cb], cb,
                &out->values[static_cast<std::size_t>(i) * (ca + cb) + ca]);
  }
  track(tape, out, a->requires_grad || b->requires_grad, [a, b, out, n, ca, cb] {
    for (int i = 0; i < n; ++i) {
      const double* grow = &out->grad[static_cast<std::size_t>(i) * (ca + cb)];
      if (a->requires_grad) {
        double* ag = &a->grad[static_cast<std::size_t>(i) * ca];
        for (int j = 0; j < ca; ++j) ag[j] += grow[j];
      }
      if (b->requires_grad) {
        double* bg = &b->grad[static_cast<std::size_t>(i) * cb];
        for (int j = 0; j < cb; ++j) bg[j] += grow[ca + j];
      }
    }
  });
  return out;
}

TensorRef add(Tape& tape, const TensorRef& a, const TensorRef& b) {
  check_same_shape("add", a, b);
  auto out = tensor(a->rows, a->cols);
  for (std::size_t i = 0; i < out->size(); ++i) out->values[i] = a->values[i] + b->values[i];
  track(tape, out, a->requires_grad || b->requires_grad, [a, b, out] {
    if (a->requires_grad)
      for (std::size_t i = 0; i < out->size(); ++i) a->grad[i] += out->grad[i];
    if (b->requires_grad)
      for (std::size_t i = 0; i < out->size(); ++i) b->grad[i] += out->grad[i];
  });
  return out;
}

TensorRef sub(Tape& tape, const TensorRef& a, const TensorRef& b) {
  check_same_shape("sub", a, b);
  auto out = tensor(a->rows, a->cols);
  for (std::size_t i = 0; i < out->size(); ++i) out->values[i] = a->values[i] - b->values[i];
  track(tape, out, a->requires_grad || b->requires_grad, [a, b, out] {
    if (a->requires_grad)
      for (std::size_t i = 0; i < out->size(); ++i) a->grad[i] += out->grad[i];
    if (b->requires_grad)
      for (std::size_t i = 0; i < out->size(); ++i) b->grad[i] -= out->grad[i];
  });
  return out;
}

TensorRef mul_elementwise(Tape& tape, const TensorRef& a, const TensorRef& b) {
  check_same_shape("mul_elementwise", a, b);
  auto out = tensor(a->rows, a->cols);
  for (std::size_t i = 0; i < out->size(); ++i) out->values[i] = a->values[i] * b->values[i];
  track(tape, out, a->requires_grad || b->requires_grad, [a, b, out] {
    if (a->requires_grad)
      for (std::size_t i = 0; i < out->size(); ++i) a->grad[i] += b->values[i] * out->grad[i];
    if (b->requires_grad)
      for (std::size_t i = 0; i < out->size(); ++i) b->grad[i] += a->values[i] * out->grad[i];
  });
  return out;
}

TensorRef scale(Tape& tape, const TensorRef& x, double factor) {
  auto out = tensor(x->rows, x->cols);
  for (std::size_t i = 0; i < out->size(); ++i) out->values[i] = factor * x->values[i];
  track(tape, out, x->requires_grad, [x, out, factor] {
    for (std::size_t i = 0; i < out->size(); ++i) x->grad[i] += factor * out->grad[i];
  });
  return out;
}

TensorRef sigmoid(Tape& tape, const TensorRef& x) {
  auto out = tensor(x->rows, x->cols);
  for (std::size_t i = 0; i < out->size(); ++i) {
    const double v = x->values[i];
    // Split on sign so the exponential never overflows.
    if (v >= 0.0) {
      out->values[i] = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      out->values[i] = e / (1.0 + e);
    }
  }
  track(tape, out, x->requires_grad, [x, out] {
    for (std::size_t i = 0; i < out->size(); ++i) {
      const double s = out->values[i];
      x->grad[i] += s * (1.0 - s) * out->grad[i];
    }
  });
  return out;
}

TensorRef relu(Tape& tape, const TensorRef& x) {
  auto out = tensor(x->rows, x->cols);
  for (std::size_t i = 0; i < out->size(); ++i) out->values[i] = x->values[i] > 0.0 ? x->values[i] : 0.0;
  track(tape, out, x->requires_grad, [x, out] {
    for (std::size_t i = 0; i < out->size(); ++i) {
      if (x->values[i] > 0.0) x->grad[i] += out->grad[i];
    }
  });
  return out;
}

TensorRef softmax_rows(Tape& tape, const TensorRef& x) {
  auto out = tensor(x->rows, x->cols);
  const int c = x->cols;
  for (int i = 0; i < x->rows; ++i) {
    const double* row = &x->values[static_cast<std::size_t>(i) * c];
    double mx = row[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double denom = 0.0;
    double* orow = &out->values[static_cast<std::size_t>(i) * c];
    for (int j = 0; j < c; ++j) {
      orow[j] = std::exp(row[j] - mx);
      denom += orow[j];
    }
    for (int j = 0; j < c; ++j) orow[j] /= denom;
  }
  track(tape, out, x->requires_grad, [x, out, c] {
    for (int i = 0; i < x->rows; ++i) {
      const double* p = &out->values[static_cast<std::size_t>(i) * c];
      const double* g = &out->grad[static_cast<std::size_t>(i) * c];
      double dot = 0.0;
      for (int j = 0; j < c; ++j) dot += p[j] * g[j];
      double* xg = &x->grad[static_cast<std::size_t>(i) * c];
      for (int j = 0; j < c; ++j) xg[j] += p[j] * (g[j] - dot);
    }
  });
  return out;
}

TensorRef sum(Tape& tape, const TensorRef& x) {
  auto out = tensor(1, 1);
  double acc = 0.0;
  for (double v : x->values) acc += v;
  out->values[0] = acc;
  track(tape, out, x->requires_grad, [x, out] {
    const double g = out->grad[0];
    for (std::size_t i = 0; i < x->size(); ++i) x->grad[i] += g;
  });
  return out;
}

TensorRef mean(Tape& tape, const TensorRef& x) {
  auto out = tensor(1, 1);
  double acc = 0.0;
  for (double v : x->values) acc += v;
  const double inv = 1.0 / static_cast<double>(x->size());
  out->values[0] = acc * inv;
  track(tape, out, x->requires_grad, [x, out, inv] {
    const double g = out->grad[0] * inv;
    for (std::size_t i = 0; i < x->size(); ++i) x->grad[i] += g;
  });
  return out;
}

TensorRef row_select(Tape& tape, const TensorRef& x, const std::vector<int>& indices) {
  if (indices.empty()) throw validation_error("row_select: empty index list");
  for (int idx : indices) {
    if (idx < 0 || idx >= x->rows) {
      throw validation_error("row_select: index " + std::to_string(idx) + " out of range for " +
                             x->shape_str());
    }
  }
  const int c = x->cols;
  auto out = tensor(static_cast<int>(indices.size()), c);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    std::copy_n(&x->values[static_cast<std::size_t>(indices[i]) * c], c,
                &out->values[i * c]);
  }
  auto idx_copy = indices;
  track(tape, out, x->requires_grad, [x, out, idx_copy = std::move(idx_copy), c] {
    for (std::size_t i = 0; i < idx_copy.size(); ++i) {
      double* xg = &x->grad[static_cast<std::size_t>(idx_copy[i]) * c];
      const double* g = &out->grad[i * c];
      for (int j = 0; j < c; ++j) xg[j] += g[j];
    }
  });
  return out;
}

TensorRef cross_entropy(Tape& tape, const TensorRef& logits, const std::vector<int>& labels) {
  const int n = logits->rows, c = logits->cols;
  if (static_cast<int>(labels.size()) != n) {
    throw validation_error("cross_entropy: " + std::to_string(labels.size()) +
                           " labels for logits " + logits->shape_str());
  }
  for (int y : labels) {
    if (y < 0 || y >= c) {
      throw validation_error("cross_entropy: label " + std::to_string(y) +
                             " out of range [0, " + std::to_string(c) + ")");
    }
  }
  auto out = tensor(1, 1);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* row = &logits->values[static_cast<std::size_t>(i) * c];
    double mx = row[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double denom = 0.0;
    for (int j = 0; j < c; ++j) denom += std::exp(row[j] - mx);
    total += std::log(denom) + mx - row[labels[i]];
  }
  out->values[0] = total / n;
  auto labels_copy = labels;
  track(tape, out, logits->requires_grad,
        [logits, out, labels_copy = std::move(labels_copy), n, c] {
          const double g = out->grad[0] / n;
          for (int i = 0; i < n; ++i) {
            const double* row = &logits->values[static_cast<std::size_t>(i) * c];
            double mx = row[0];
            for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
            double denom = 0.0;
            for (int j = 0; j < c; ++j) denom += std::exp(row[j] - mx);
            double* lg = &logits->grad[static_cast<std::size_t>(i) * c];
            for (int j = 0; j < c; ++j) {
              const double p = std::exp(row[j] - mx) / denom;
              lg[j] += g * (p - (j == labels_copy[i] ? 1.0 : 0.0));
            }
          }
        });
  return out;
}

GradCheckReport grad_check(const ScalarFn& f, const Tensor& x, double step, double tol) {
  if (step <= 0.0) throw validation_error("grad_check: step must be positive");
  // Analytic pass.
  auto xref = std::make_shared<Tensor>(x);
  xref->requires_grad = true;
  xref->zero_grad();
  Tape tape;
  TensorRef y = f(tape, xref);
  if (y->rows != 1 || y->cols != 1) {
    throw validation_error("grad_check: f must return a scalar, got " + y->shape_str());
  }
  tape.backward(y);
  const std::vector<double> analytic = xref->grad;

  auto eval = [&](const Tensor& point) {
    auto p = std::make_shared<Tensor>(point);
    p->requires_grad = false;
    p->grad.clear();
    Tape t;
    TensorRef out = f(t, p);
    return out->values[0];
  };

  GradCheckReport report;
  Tensor probe = x;
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < x.cols; ++j) {
      const double saved = probe.at(i, j);
      probe.at(i, j) = saved + step;
      const double up = eval(probe);
      probe.at(i, j) = saved - step;
      const double down = eval(probe);
      probe.at(i, j) = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[static_cast<std::size_t>(i) * x.cols + j];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-4});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > report.max_rel_err || report.worst_row < 0) {
        report.max_rel_err = rel;
        report.worst_row = i;
        report.worst_col = j;
        report.analytic = a;
        report.numeric = numeric;
      }
    }
  }
  report.ok = report.max_rel_err <= tol;
  return report;
}

}  // namespace glance
