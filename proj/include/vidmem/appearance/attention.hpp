#pragma once

// Text-guided attention over equal segments of the multi-level feature.
//
// The multi-level vector is cut into l segments. Each segment and the text
// feature go through their own two-layer projector (linear, ReLU, linear)
// into a common space; the projector weights are shared across segments.
// The segment logit is score . tanh(seg_proj + text_proj), the weights are
// a softmax over segments, and the output is the weighted sum of the raw
// (unprojected) segments.

#include <string>

#include "vidmem/appearance/multilevel.hpp"

namespace vidmem::appearance {

struct AttentionOutput {
  Tensor enhanced;  // f_ve, [segment_dim]
  Tensor weights;   // alpha, [segments]
  Tensor logits;    // e, [segments]
};

class TextVisualAttention {
 public:
  static TextVisualAttention create(ParamSet& params, const std::string& prefix, std::size_t segment_dim,
                                    std::size_t text_dim, std::size_t common_dim, std::size_t segments);

  // Throws ConfigError when the inputs do not fit the projector sizes.
  AttentionOutput attend(const ParamSet& params, const Tensor& multilevel, const Tensor& text) const;

  std::size_t segments() const { return segments_; }
  std::size_t segment_dim() const { return u_v_.in; }

 private:
  Linear u_v_, w_v_, u_t_, w_t_, score_;
  std::size_t segments_ = 0;
};

}  // namespace vidmem::appearance
