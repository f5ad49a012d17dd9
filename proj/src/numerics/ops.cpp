#include "vidmem/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vidmem/errors.hpp"
#include "vidmem/kernels/kernels.hpp"

namespace vidmem::ops {
namespace {

using detail::Node;

void accumulate(Node& target, std::span<const double> g) {
  if (!target.requires_grad) return;
  auto& buf = target.grad_buffer();
  kernels::active().axpy(1.0, g.data(), buf.data(), g.size());
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
}

void require_rank(const Tensor& x, std::size_t rank, const char* op) {
  if (x.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         ", got shape " + shape_str(x.shape()));
  }
}

// Elementwise unary op given f(x) and f'(x, y).
template <class F, class DF>
Tensor unary(const char* name, const Tensor& x, F f, DF df) {
  const auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  return Tensor::from_op(name, x.shape(), std::move(out), {x}, [df](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * df(p.data[i], self.data[i]);
  });
}

double stable_sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

// Neumaier-compensated sum of values sorted ascending.
double sorted_compensated_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.data().begin(), a.data().end());
  kernels::active().axpy(1.0, b.data().data(), out.data(), out.size());
  return Tensor::from_op("add", a.shape(), std::move(out), {a, b}, [](Node& self) {
    accumulate(*self.parents[0], self.grad);
    accumulate(*self.parents[1], self.grad);
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.data().begin(), a.data().end());
  kernels::active().axpy(-1.0, b.data().data(), out.data(), out.size());
  return Tensor::from_op("sub", a.shape(), std::move(out), {a, b}, [](Node& self) {
    accumulate(*self.parents[0], self.grad);
    Node& rhs = *self.parents[1];
    if (rhs.requires_grad) {
      kernels::active().axpy(-1.0, self.grad.data(), rhs.grad_buffer().data(), self.grad.size());
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.numel());
  kernels::active().mul(a.data().data(), b.data().data(), out.data(), out.size());
  return Tensor::from_op("mul", a.shape(), std::move(out), {a, b}, [](Node& self) {
    const auto& k = kernels::active();
    Node& lhs = *self.parents[0];
    Node& rhs = *self.parents[1];
    if (lhs.requires_grad) k.mul_acc(self.grad.data(), rhs.data.data(), lhs.grad_buffer().data(), self.grad.size());
    if (rhs.requires_grad) k.mul_acc(self.grad.data(), lhs.data.data(), rhs.grad_buffer().data(), self.grad.size());
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.numel(), 0.0);
  kernels::active().axpy(factor, a.data().data(), out.data(), out.size());
  return Tensor::from_op("scale", a.shape(), std::move(out), {a}, [factor](Node& self) {
    Node& p = *self.parents[0];
    if (p.requires_grad) kernels::active().axpy(factor, self.grad.data(), p.grad_buffer().data(), self.grad.size());
  });
}

Tensor add_scalar(const Tensor& a, double value) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& v : out) v += value;
  return Tensor::from_op("add_scalar", a.shape(), std::move(out), {a},
                         [](Node& self) { accumulate(*self.parents[0], self.grad); });
}

Tensor square(const Tensor& a) {
  return unary("square", a, [](double v) { return v * v; }, [](double x, double) { return 2.0 * x; });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_rank(bias, 1, "add_bias");
  const std::size_t n = bias.numel();
  if (x.shape().back() != n) {
    throw DimensionError("add_bias: last axis of " + shape_str(x.shape()) + " does not match bias " +
                         shape_str(bias.shape()));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  const std::size_t rows = out.size() / n;
  for (std::size_t r = 0; r < rows; ++r) {
    kernels::active().axpy(1.0, bias.data().data(), out.data() + r * n, n);
  }
  return Tensor::from_op("add_bias", x.shape(), std::move(out), {x, bias}, [rows, n](Node& self) {
    accumulate(*self.parents[0], self.grad);
    Node& b = *self.parents[1];
    if (!b.requires_grad) return;
    auto& g = b.grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) kernels::active().axpy(1.0, self.grad.data() + r * n, g.data(), n);
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() > 2 || b.rank() > 2) {
    throw DimensionError("matmul: operands must be rank 1 or 2, got " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
  }
  const bool a_vec = a.rank() == 1;
  const bool b_vec = b.rank() == 1;
  const std::size_t m = a_vec ? 1 : a.dim(0);
  const std::size_t k = a_vec ? a.dim(0) : a.dim(1);
  const std::size_t kb = b.dim(0);
  const std::size_t n = b_vec ? 1 : b.dim(1);
  if (k != kb) {
    throw DimensionError("matmul: inner dimensions disagree for " + shape_str(a.shape()) + " @ " +
                         shape_str(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  const auto& t = kernels::active();
  if (b_vec) {
    for (std::size_t i = 0; i < m; ++i) out[i] = t.dot(a.data().data() + i * k, b.data().data(), k);
  } else {
    kernels::gemm_nn(t, m, k, n, a.data().data(), b.data().data(), out.data());
  }
  Shape shape;
  if (!a_vec) shape.push_back(m);
  if (!b_vec) shape.push_back(n);
  if (shape.empty()) shape.push_back(1);
  return Tensor::from_op("matmul", std::move(shape), std::move(out), {a, b}, [m, k, n](Node& self) {
    const auto& t = kernels::active();
    Node& lhs = *self.parents[0];
    Node& rhs = *self.parents[1];
    if (lhs.requires_grad) kernels::gemm_nt(t, m, n, k, self.grad.data(), rhs.data.data(), lhs.grad_buffer().data());
    if (rhs.requires_grad) kernels::gemm_tn(t, k, m, n, lhs.data.data(), self.grad.data(), rhs.grad_buffer().data());
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank(weight, 2, "linear weight");
  const std::size_t d_in = weight.dim(0);
  const std::size_t d_out = weight.dim(1);
  if (x.shape().back() != d_in) {
    throw DimensionError("linear: input " + shape_str(x.shape()) + " does not match weight " +
                         shape_str(weight.shape()));
  }
  if (bias.defined() && (bias.rank() != 1 || bias.numel() != d_out)) {
    throw DimensionError("linear: bias " + shape_str(bias.shape()) + " does not match weight " +
                         shape_str(weight.shape()));
  }
  Tensor flat = x.rank() <= 2 ? x : reshape(x, {x.numel() / d_in, d_in});
  Tensor y = matmul(flat, weight);
  if (bias.defined()) y = add_bias(y, bias);
  if (x.rank() > 2) {
    Shape out_shape = x.shape();
    out_shape.back() = d_out;
    y = reshape(y, std::move(out_shape));
  }
  return y;
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "softmax") return Activation::Softmax;
  throw ParameterError("unknown activation kind '" + std::string(name) + "'");
}

Tensor activation(Activation kind, const Tensor& x) {
  switch (kind) {
    case Activation::Relu: return relu(x);
    case Activation::Tanh: return tanh(x);
    case Activation::Sigmoid: return sigmoid(x);
    case Activation::Softmax: return softmax(x);
  }
  throw ParameterError("unknown activation kind");
}

Tensor relu(const Tensor& x) {
  return unary("relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double in, double) { return in > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh(const Tensor& x) {
  return unary("tanh", x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary("sigmoid", x, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor exp(const Tensor& x) {
  return unary("exp", x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  for (double v : x.data()) {
    if (!(v > 0.0)) throw DomainError("log: non-positive input " + std::to_string(v));
  }
  return unary("log", x, [](double v) { return std::log(v); }, [](double in, double) { return 1.0 / in; });
}

Tensor softplus(const Tensor& x) {
  return unary("softplus", x, [](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); },
               [](double in, double) { return stable_sigmoid(in); });
}

Tensor softmax(const Tensor& x) {
  const std::size_t n = x.shape().back();
  const std::size_t rows = x.numel() / n;
  const auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = in.data() + r * n;
    double* yr = out.data() + r * n;
    const double mx = *std::max_element(xr, xr + n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      yr[i] = std::exp(xr[i] - mx);
      total += yr[i];
    }
    for (std::size_t i = 0; i < n; ++i) yr[i] /= total;
  }
  return Tensor::from_op("softmax", x.shape(), std::move(out), {x}, [rows, n](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = self.data.data() + r * n;
      const double* gy = self.grad.data() + r * n;
      double inner = 0.0;
      for (std::size_t i = 0; i < n; ++i) inner += gy[i] * y[i];
      for (std::size_t i = 0; i < n; ++i) g[r * n + i] += y[i] * (gy[i] - inner);
    }
  });
}

Tensor sum(const Tensor& x) {
  const double total = kernels::active().sum(x.data().data(), x.numel());
  return Tensor::from_op("sum", {1}, {total}, {x}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    const double g = self.grad[0];
    for (double& v : p.grad_buffer()) v += g;
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.numel())); }

Tensor dot(const Tensor& a, const Tensor& b) {
  require_rank(a, 1, "dot");
  require_same_shape(a, b, "dot");
  return matmul(a, b);
}

Tensor logsumexp(const Tensor& x) {
  require_rank(x, 1, "logsumexp");
  const auto in = x.data();
  const double mx = *std::max_element(in.begin(), in.end());
  std::vector<double> terms(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) terms[i] = std::exp(in[i] - mx);
  const double total = sorted_compensated_sum(terms);
  const double value = mx + std::log(total);
  return Tensor::from_op("logsumexp", {1}, {value}, {x},
                         [weights = std::move(terms), total](Node& self) {
                           Node& p = *self.parents[0];
                           if (!p.requires_grad) return;
                           auto& g = p.grad_buffer();
                           const double gy = self.grad[0];
                           for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy * weights[i] / total;
                         });
}

Tensor mean_pool(const Tensor& x) {
  require_rank(x, 2, "mean_pool");
  const std::size_t t_len = x.dim(0);
  const std::size_t d = x.dim(1);
  if (t_len == 0) throw DomainError("mean_pool: empty time axis");
  std::vector<double> out(d, 0.0);
  const auto& k = kernels::active();
  for (std::size_t t = 0; t < t_len; ++t) k.axpy(1.0, x.data().data() + t * d, out.data(), d);
  const double inv = 1.0 / static_cast<double>(t_len);
  for (double& v : out) v *= inv;
  return Tensor::from_op("mean_pool", {d}, std::move(out), {x}, [t_len, d, inv](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer();
    for (std::size_t t = 0; t < t_len; ++t) kernels::active().axpy(inv, self.grad.data(), g.data() + t * d, d);
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return Tensor::from_op("reshape", std::move(shape), std::move(out), {x},
                         [](Node& self) { accumulate(*self.parents[0], self.grad); });
}

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  std::vector<std::size_t> offsets;
  std::vector<double> out;
  for (const Tensor& p : parts) {
    require_rank(p, 1, "concat");
    offsets.push_back(out.size());
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  const std::size_t total = out.size();
  return Tensor::from_op("concat", {total}, std::move(out), parts, [offsets](Node& self) {
    for (std::size_t i = 0; i < self.parents.size(); ++i) {
      Node& p = *self.parents[i];
      accumulate(p, std::span<const double>(self.grad).subspan(offsets[i], p.data.size()));
    }
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t rows = parts.front().dim(0);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    require_rank(p, 2, "concat_cols");
    if (p.dim(0) != rows) {
      throw DimensionError("concat_cols: row count mismatch " + shape_str(parts.front().shape()) + " vs " +
                           shape_str(p.shape()));
    }
    widths.push_back(p.dim(1));
    total += p.dim(1);
  }
  std::vector<double> out(rows * total);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t col = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const double* src = parts[i].data().data() + r * widths[i];
      std::copy(src, src + widths[i], out.data() + r * total + col);
      col += widths[i];
    }
  }
  return Tensor::from_op("concat_cols", {rows, total}, std::move(out), parts, [rows, total, widths](Node& self) {
    std::size_t col = 0;
    for (std::size_t i = 0; i < self.parents.size(); ++i) {
      Node& p = *self.parents[i];
      if (p.requires_grad) {
        auto& g = p.grad_buffer();
        for (std::size_t r = 0; r < rows; ++r) {
          kernels::active().axpy(1.0, self.grad.data() + r * total + col, g.data() + r * widths[i], widths[i]);
        }
      }
      col += widths[i];
    }
  });
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw DimensionError("stack_rows: no inputs");
  const std::size_t d = rows.front().numel();
  std::vector<double> out;
  out.reserve(rows.size() * d);
  for (const Tensor& r : rows) {
    require_rank(r, 1, "stack_rows");
    if (r.numel() != d) throw DimensionError("stack_rows: row width mismatch");
    out.insert(out.end(), r.data().begin(), r.data().end());
  }
  return Tensor::from_op("stack_rows", {rows.size(), d}, std::move(out), rows, [d](Node& self) {
    for (std::size_t i = 0; i < self.parents.size(); ++i) {
      accumulate(*self.parents[i], std::span<const double>(self.grad).subspan(i * d, d));
    }
  });
}

Tensor slice(const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank(x, 1, "slice");
  if (begin >= end || end > x.numel()) {
    throw DimensionError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") invalid for " + shape_str(x.shape()));
  }
  std::vector<double> out(x.data().begin() + begin, x.data().begin() + end);
  return Tensor::from_op("slice", {end - begin}, std::move(out), {x}, [begin](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    kernels::active().axpy(1.0, self.grad.data(), p.grad_buffer().data() + begin, self.grad.size());
  });
}

Tensor row(const Tensor& x, std::size_t index) {
  require_rank(x, 2, "row");
  const std::size_t d = x.dim(1);
  if (index >= x.dim(0)) {
    throw DimensionError("row: index " + std::to_string(index) + " out of range for " + shape_str(x.shape()));
  }
  std::vector<double> out(x.data().begin() + index * d, x.data().begin() + (index + 1) * d);
  return Tensor::from_op("row", {d}, std::move(out), {x}, [index, d](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    kernels::active().axpy(1.0, self.grad.data(), p.grad_buffer().data() + index * d, d);
  });
}

Tensor reverse_rows(const Tensor& x) {
  require_rank(x, 2, "reverse_rows");
  const std::size_t t_len = x.dim(0);
  const std::size_t d = x.dim(1);
  std::vector<double> out(x.numel());
  for (std::size_t t = 0; t < t_len; ++t) {
    std::copy_n(x.data().data() + (t_len - 1 - t) * d, d, out.data() + t * d);
  }
  return Tensor::from_op("reverse_rows", x.shape(), std::move(out), {x}, [t_len, d](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer();
    for (std::size_t t = 0; t < t_len; ++t) {
      kernels::active().axpy(1.0, self.grad.data() + t * d, g.data() + (t_len - 1 - t) * d, d);
    }
  });
}

Tensor l2_normalize(const Tensor& x, double eps) {
  require_rank(x, 1, "l2_normalize");
  const auto in = x.data();
  const double norm = std::max(std::sqrt(kernels::active().dot(in.data(), in.data(), in.size())), eps);
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] / norm;
  return Tensor::from_op("l2_normalize", x.shape(), std::move(out), {x}, [norm, eps](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer();
    const std::size_t n = g.size();
    if (norm <= eps) {
      for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[i] / norm;
      return;
    }
    const double proj = kernels::active().dot(self.grad.data(), self.data.data(), n);
    for (std::size_t i = 0; i < n; ++i) g[i] += (self.grad[i] - self.data[i] * proj) / norm;
  });
}

Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel_size) {
  if (kernel_size == 0) throw ParameterError("conv1d: kernel_size must be >= 1");
  require_rank(x, 2, "conv1d input");
  require_rank(weight, 2, "conv1d weight");
  const std::size_t t_len = x.dim(0);
  const std::size_t d = x.dim(1);
  const std::size_t out_ch = weight.dim(1);
  if (weight.dim(0) != kernel_size * d) {
    throw DimensionError("conv1d: weight " + shape_str(weight.shape()) + " does not match kernel " +
                         std::to_string(kernel_size) + " over input " + shape_str(x.shape()));
  }
  if (bias.rank() != 1 || bias.numel() != out_ch) {
    throw DimensionError("conv1d: bias " + shape_str(bias.shape()) + " does not match weight " +
                         shape_str(weight.shape()));
  }
  const std::size_t left = (kernel_size - 1) / 2;
  const std::size_t width = kernel_size * d;
  std::vector<double> patches(t_len * width, 0.0);
  const auto in = x.data();
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t j = 0; j < kernel_size; ++j) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + j) - static_cast<std::ptrdiff_t>(left);
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(t_len)) continue;
      std::copy_n(in.data() + static_cast<std::size_t>(src) * d, d, patches.data() + t * width + j * d);
    }
  }
  std::vector<double> out(t_len * out_ch, 0.0);
  const auto& k = kernels::active();
  kernels::gemm_nn(k, t_len, width, out_ch, patches.data(), weight.data().data(), out.data());
  for (std::size_t t = 0; t < t_len; ++t) k.axpy(1.0, bias.data().data(), out.data() + t * out_ch, out_ch);

  return Tensor::from_op(
      "conv1d", {t_len, out_ch}, std::move(out), {x, weight, bias},
      [patches = std::move(patches), t_len, d, out_ch, width, left, kernel_size](Node& self) {
        const auto& k = kernels::active();
        Node& xn = *self.parents[0];
        Node& wn = *self.parents[1];
        Node& bn = *self.parents[2];
        if (wn.requires_grad) kernels::gemm_tn(k, width, t_len, out_ch, patches.data(), self.grad.data(), wn.grad_buffer().data());
        if (bn.requires_grad) {
          auto& gb = bn.grad_buffer();
          for (std::size_t t = 0; t < t_len; ++t) k.axpy(1.0, self.grad.data() + t * out_ch, gb.data(), out_ch);
        }
        if (xn.requires_grad) {
          std::vector<double> dpatch(t_len * width, 0.0);
          kernels::gemm_nt(k, t_len, out_ch, width, self.grad.data(), wn.data.data(), dpatch.data());
          auto& gx = xn.grad_buffer();
          for (std::size_t t = 0; t < t_len; ++t) {
            for (std::size_t j = 0; j < kernel_size; ++j) {
              const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + j) - static_cast<std::ptrdiff_t>(left);
              if (src < 0 || src >= static_cast<std::ptrdiff_t>(t_len)) continue;
              k.axpy(1.0, dpatch.data() + t * width + j * d, gx.data() + static_cast<std::size_t>(src) * d, d);
            }
          }
        }
      });
}

Tensor dropout(const Tensor& x, double rate, bool training, std::mt19937_64* rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ParameterError("dropout: rate must be in [0, 1)");
  if (!training || rate == 0.0) return x;
  if (rng == nullptr) throw ParameterError("dropout: training mode requires an rng");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.numel());
  for (double& m : mask) m = unit(*rng) >= rate ? keep_scale : 0.0;
  std::vector<double> out(x.numel());
  kernels::active().mul(x.data().data(), mask.data(), out.data(), out.size());
  return Tensor::from_op("dropout", x.shape(), std::move(out), {x}, [mask = std::move(mask)](Node& self) {
    Node& p = *self.parents[0];
    if (p.requires_grad) kernels::active().mul_acc(self.grad.data(), mask.data(), p.grad_buffer().data(), mask.size());
  });
}

}  // namespace vidmem::ops
