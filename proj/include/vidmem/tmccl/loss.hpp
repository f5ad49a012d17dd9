#pragma once

#include <span>
#include <vector>

#include "vidmem/numerics/tensor.hpp"

namespace vidmem::tmccl {

// exp(a . b / tau). Throws ParameterError when tau <= 0.
Tensor similarity(const Tensor& a, const Tensor& b, double tau);

// Contrastive loss of a target embedding against its positive and negative
// sets:
//
//   L = -log( sum_pos s / (sum_pos s + sum_neg s) )
//     = softplus( LSE(neg . target / tau) - LSE(pos . target / tau) )
//
// evaluated in log space so tau = 0.07 never overflows. Exactly 0 when
// `negatives` is empty. Every input may carry gradients. Throws DomainError
// on an empty positive set.
Tensor tmccl_loss(const Tensor& target, const std::vector<Tensor>& positives, const std::vector<Tensor>& negatives,
                  double tau);

// mean_b[(pred_b - gt_b)^2 + lambda * contrastive_b]. `pred` and
// `contrastive` are [B]. Throws RangeError when a prediction or target lies
// outside [0, 1], ParameterError when lambda < 0.
Tensor overall_loss(const Tensor& pred, std::span<const double> gt, const Tensor& contrastive, double lambda);

}  // namespace vidmem::tmccl
