#include "vidmem/tmccl/loss.hpp"

#include <string>

#include "vidmem/errors.hpp"
#include "vidmem/numerics/ops.hpp"

namespace vidmem::tmccl {
namespace {

void check_tau(double tau) {
  if (!(tau > 0.0)) throw ParameterError("temperature tau must be > 0, got " + std::to_string(tau));
}

// [n] logits: set_i . target / tau
Tensor logits(const Tensor& target, const std::vector<Tensor>& set, double tau) {
  return ops::scale(ops::matmul(ops::stack_rows(set), target), 1.0 / tau);
}

}  // namespace

Tensor similarity(const Tensor& a, const Tensor& b, double tau) {
  check_tau(tau);
  return ops::exp(ops::scale(ops::dot(a, b), 1.0 / tau));
}

Tensor tmccl_loss(const Tensor& target, const std::vector<Tensor>& positives, const std::vector<Tensor>& negatives,
                  double tau) {
  check_tau(tau);
  if (positives.empty()) throw DomainError("tmccl_loss: the positive set is empty");
  if (negatives.empty()) return Tensor::scalar(0.0);
  const Tensor pos = ops::logsumexp(logits(target, positives, tau));
  const Tensor neg = ops::logsumexp(logits(target, negatives, tau));
  return ops::softplus(ops::sub(neg, pos));
}

Tensor overall_loss(const Tensor& pred, std::span<const double> gt, const Tensor& contrastive, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
  if (pred.rank() != 1 || contrastive.rank() != 1 || pred.numel() != gt.size() || contrastive.numel() != gt.size()) {
    throw DimensionError("overall_loss: pred " + shape_str(pred.shape()) + ", contrastive " +
                         shape_str(contrastive.shape()) + " and " + std::to_string(gt.size()) +
                         " targets must agree");
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (pred.data()[i] < 0.0 || pred.data()[i] > 1.0) {
      throw RangeError("overall_loss: prediction " + std::to_string(i) + " outside [0, 1]");
    }
    if (gt[i] < 0.0 || gt[i] > 1.0) throw RangeError("overall_loss: target " + std::to_string(i) + " outside [0, 1]");
  }
  const Tensor target = Tensor::vector(std::vector<double>(gt.begin(), gt.end()));
  Tensor per_item = ops::square(ops::sub(pred, target));
  if (lambda > 0.0) per_item = ops::add(per_item, ops::scale(contrastive, lambda));
  return ops::mean(per_item);
}

}  // namespace vidmem::tmccl
