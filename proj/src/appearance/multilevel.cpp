#include "vidmem/appearance/multilevel.hpp"

#include "vidmem/errors.hpp"

namespace vidmem::appearance {

void AppearanceConfig::validate() const {
  if (d_v == 0 || d_t == 0 || gru_hidden == 0 || conv_channels == 0 || segments == 0 || common_dim == 0) {
    throw ConfigError("appearance: all sizes must be positive");
  }
  if (d_vm() % segments != 0) {
    throw ConfigError("appearance: multi-level width " + std::to_string(d_vm()) + " (= " + std::to_string(d_v) +
                      " + 2*" + std::to_string(gru_hidden) + " + 4*" + std::to_string(conv_channels) +
                      ") is not divisible by " + std::to_string(segments) + " segments");
  }
}

Tensor encode_global(const Tensor& frames) { return ops::mean_pool(frames); }

TemporalFeature encode_temporal(const ParamSet& params, const BiGru& gru, const Tensor& frames) {
  Tensor states = gru.forward(params, frames);
  Tensor pooled = ops::mean_pool(states);
  return {std::move(states), std::move(pooled)};
}

Tensor encode_local(const ParamSet& params, const std::array<Conv1d, 4>& convs, const Tensor& states) {
  std::vector<Tensor> blocks;
  blocks.reserve(convs.size());
  for (const Conv1d& conv : convs) blocks.push_back(ops::mean_pool(ops::relu(conv.forward(params, states))));
  return ops::concat(blocks);
}

MultiLevelEncoder MultiLevelEncoder::create(ParamSet& params, const std::string& prefix,
                                            const AppearanceConfig& cfg) {
  cfg.validate();
  MultiLevelEncoder enc;
  enc.cfg_ = cfg;
  enc.gru_ = BiGru::create(params, prefix + ".bigru", cfg.d_v, cfg.gru_hidden);
  for (std::size_t i = 0; i < kLocalKernelSizes.size(); ++i) {
    const std::size_t k = kLocalKernelSizes[i];
    enc.convs_[i] = Conv1d::create(params, prefix + ".conv" + std::to_string(k), 2 * cfg.gru_hidden,
                                   cfg.conv_channels, k);
  }
  return enc;
}

MultiLevelFeature MultiLevelEncoder::encode(const ParamSet& params, const Tensor& frames) const {
  if (frames.rank() != 2 || frames.dim(1) != cfg_.d_v) {
    throw DimensionError("multi-level encoder expects frames (n," + std::to_string(cfg_.d_v) + "), got " +
                         shape_str(frames.shape()));
  }
  MultiLevelFeature out;
  out.global_part = encode_global(frames);
  TemporalFeature temporal = encode_temporal(params, gru_, frames);
  out.temporal_part = temporal.pooled;
  out.local_part = encode_local(params, convs_, temporal.states);
  out.concat = ops::concat({out.global_part, out.temporal_part, out.local_part});
  return out;
}

}  // namespace vidmem::appearance
