#include "vidmem/appearance/attention.hpp"

#include "vidmem/errors.hpp"

namespace vidmem::appearance {

TextVisualAttention TextVisualAttention::create(ParamSet& params, const std::string& prefix,
                                                std::size_t segment_dim, std::size_t text_dim,
                                                std::size_t common_dim, std::size_t segments) {
  if (segments == 0) throw ConfigError("attention: segment count must be >= 1");
  if (segment_dim == 0 || text_dim == 0 || common_dim == 0) throw ConfigError("attention: sizes must be positive");
  TextVisualAttention att;
  att.u_v_ = Linear::create(params, prefix + ".u_v", segment_dim, common_dim);
  att.w_v_ = Linear::create(params, prefix + ".w_v", common_dim, common_dim);
  att.u_t_ = Linear::create(params, prefix + ".u_t", text_dim, common_dim);
  att.w_t_ = Linear::create(params, prefix + ".w_t", common_dim, common_dim);
  // A bias here would shift every logit equally and cancel in the softmax.
  att.score_ = Linear::create(params, prefix + ".score", common_dim, 1, false);
  att.segments_ = segments;
  return att;
}

AttentionOutput TextVisualAttention::attend(const ParamSet& params, const Tensor& multilevel,
                                            const Tensor& text) const {
  const std::size_t seg = u_v_.in;
  if (multilevel.rank() != 1 || multilevel.numel() != seg * segments_) {
    throw ConfigError("attention: multi-level feature " + shape_str(multilevel.shape()) + " is not " +
                      std::to_string(segments_) + " segments of width " + std::to_string(seg));
  }
  if (text.rank() != 1 || text.numel() != u_t_.in) {
    throw ConfigError("attention: text feature " + shape_str(text.shape()) + " does not match projector width " +
                      std::to_string(u_t_.in));
  }
  const Tensor segs = ops::reshape(multilevel, {segments_, seg});
  const Tensor seg_proj = w_v_.forward(params, ops::relu(u_v_.forward(params, segs)));
  const Tensor text_proj = w_t_.forward(params, ops::relu(u_t_.forward(params, text)));
  const Tensor joint = ops::tanh(ops::add_bias(seg_proj, text_proj));
  AttentionOutput out;
  out.logits = ops::reshape(score_.forward(params, joint), {segments_});
  out.weights = ops::softmax(out.logits);
  out.enhanced = ops::matmul(out.weights, segs);
  return out;
}

}  // namespace vidmem::appearance
