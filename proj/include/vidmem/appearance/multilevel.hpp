#pragma once

// Multi-level visual appearance encoding: global mean of frame features,
// mean of bidirectional GRU states, and mean-pooled ReLU responses of
// 1-D convolutions with kernel sizes 2..5 over the GRU states.

#include <array>
#include <cstddef>
#include <string>

#include "vidmem/numerics/layers.hpp"

namespace vidmem::appearance {

inline constexpr std::array<std::size_t, 4> kLocalKernelSizes{2, 3, 4, 5};

struct AppearanceConfig {
  std::size_t d_v = 512;
  std::size_t d_t = 768;
  std::size_t gru_hidden = 1024;
  std::size_t conv_channels = 512;  // per kernel size
  std::size_t segments = 9;
  std::size_t common_dim = 512;

  std::size_t d_vm() const { return d_v + 2 * gru_hidden + kLocalKernelSizes.size() * conv_channels; }
  std::size_t segment_dim() const { return d_vm() / segments; }
  // ConfigError when a size is zero or d_vm is not divisible by segments.
  void validate() const;
};

struct MultiLevelFeature {
  Tensor global_part;    // [d_v]
  Tensor temporal_part;  // [2 * hidden]
  Tensor local_part;     // [4 * channels]
  Tensor concat;         // [d_vm] = [global ; temporal ; local]
};

// Mean over frames, frames[n, d_v] -> [d_v].
Tensor encode_global(const Tensor& frames);

struct TemporalFeature {
  Tensor states;  // H = [n, 2 * hidden]
  Tensor pooled;  // mean over n
};
TemporalFeature encode_temporal(const ParamSet& params, const BiGru& gru, const Tensor& frames);

// For each kernel size k in 2..5: mean_pool(relu(conv1d_k(H))), concatenated
// in ascending k.
Tensor encode_local(const ParamSet& params, const std::array<Conv1d, 4>& convs, const Tensor& states);

class MultiLevelEncoder {
 public:
  static MultiLevelEncoder create(ParamSet& params, const std::string& prefix, const AppearanceConfig& cfg);

  MultiLevelFeature encode(const ParamSet& params, const Tensor& frames) const;

  const BiGru& gru() const { return gru_; }
  const std::array<Conv1d, 4>& convs() const { return convs_; }
  const AppearanceConfig& config() const { return cfg_; }

 private:
  AppearanceConfig cfg_;
  BiGru gru_;
  std::array<Conv1d, 4> convs_;
};

}  // namespace vidmem::appearance
