#pragma once

// Differentiable tensor operations. Every op validates shapes, produces a
// fresh tensor, and records a backward closure when any input tracks
// gradients.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "vidmem/numerics/tensor.hpp"

namespace vidmem::ops {

// Elementwise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);
Tensor square(const Tensor& a);

// x[..., n] + bias[n], broadcast over leading rows.
Tensor add_bias(const Tensor& x, const Tensor& bias);

// a[m,k] @ b[k,n]; rank-1 a is treated as [1,k] and yields [n], rank-1 b as
// [k,1] and yields [m].
Tensor matmul(const Tensor& a, const Tensor& b);

// x[*, d_in] @ weight[d_in, d_out] (+ bias[d_out]). Leading dimensions of x
// are flattened and restored.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias = Tensor());

enum class Activation { Relu, Tanh, Sigmoid, Softmax };
// Throws ParameterError for unknown names.
Activation parse_activation(std::string_view name);
Tensor activation(Activation kind, const Tensor& x);
Tensor relu(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
// Over the last axis.
Tensor softmax(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
// log(1 + exp(x)), stable for large |x|.
Tensor softplus(const Tensor& x);

// Scalar reductions.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor dot(const Tensor& a, const Tensor& b);
// log(sum(exp(x))) over a rank-1 tensor. Terms are summed in sorted order
// with compensation, so the result does not depend on element order.
Tensor logsumexp(const Tensor& x);

// Mean over the time axis of x[T, D]; throws DomainError when T == 0.
Tensor mean_pool(const Tensor& x);

// Structural ops.
Tensor reshape(const Tensor& x, Shape shape);
Tensor concat(const std::vector<Tensor>& parts);       // rank-1 pieces
Tensor concat_cols(const std::vector<Tensor>& parts);  // [T, d_i] -> [T, sum d_i]
Tensor stack_rows(const std::vector<Tensor>& rows);    // [D] each -> [T, D]
Tensor slice(const Tensor& x, std::size_t begin, std::size_t end);  // rank-1
Tensor row(const Tensor& x, std::size_t index);                     // [T, D] -> [D]
Tensor reverse_rows(const Tensor& x);                               // flip time

Tensor l2_normalize(const Tensor& x, double eps = 1e-12);

// Same-length 1-D convolution over time. x[T, D], weight[k*D, out] laid out
// tap-major (rows j*D..j*D+D-1 hold tap j), bias[out]. Zero padding of
// floor((k-1)/2) before and ceil((k-1)/2) after the sequence.
Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel_size);

// Inverted dropout: identity when !training or rate == 0.
Tensor dropout(const Tensor& x, double rate, bool training, std::mt19937_64* rng);

}  // namespace vidmem::ops
