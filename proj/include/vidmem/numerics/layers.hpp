#pragma once

// Parameterized building blocks. A layer is a named description of where
// its parameters live in a ParamSet; forward passes look them up, so models
// stay copyable by value together with their ParamSet.

#include <cstddef>
#include <string>

#include "vidmem/numerics/ops.hpp"
#include "vidmem/numerics/params.hpp"

namespace vidmem {

struct Linear {
  std::string name;
  std::size_t in = 0;
  std::size_t out = 0;
  bool has_bias = true;

  static Linear create(ParamSet& params, const std::string& name, std::size_t in, std::size_t out,
                       bool bias = true);
  Tensor forward(const ParamSet& params, const Tensor& x) const;
};

// Same-length temporal convolution, see ops::conv1d for padding.
struct Conv1d {
  std::string name;
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t kernel_size = 0;

  static Conv1d create(ParamSet& params, const std::string& name, std::size_t in, std::size_t out,
                       std::size_t kernel_size);
  Tensor forward(const ParamSet& params, const Tensor& x) const;
};

// Single-direction GRU, reset gate applied before the recurrent projection:
//   r = sigmoid(x W_ir + b_ir + h W_hr + b_hr)
//   z = sigmoid(x W_iz + b_iz + h W_hz + b_hz)
//   n = tanh(x W_in + b_in + (r * h) W_hn + b_hn)
//   h' = (1 - z) * n + z * h,     h_0 = 0
struct Gru {
  std::string name;
  std::size_t in = 0;
  std::size_t hidden = 0;

  static Gru create(ParamSet& params, const std::string& name, std::size_t in, std::size_t hidden);
  // x[T, in] -> states[T, hidden]
  Tensor forward(const ParamSet& params, const Tensor& x) const;
};

// Row t of the output is [forward state at t ; backward state at t], where
// the backward GRU reads the sequence from the end.
struct BiGru {
  Gru forward_dir;
  Gru backward_dir;

  static BiGru create(ParamSet& params, const std::string& name, std::size_t in, std::size_t hidden);
  std::size_t hidden() const { return forward_dir.hidden; }
  // x[T, in] -> [T, 2*hidden]
  Tensor forward(const ParamSet& params, const Tensor& x) const;
};

}  // namespace vidmem
