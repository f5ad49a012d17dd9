#include "vidmem/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "vidmem/errors.hpp"

namespace vidmem {
namespace {

double evaluate(const std::function<Tensor()>& loss_fn, const std::string& name) {
  NoGradGuard no_grad;
  try {
    return loss_fn().item();
  } catch (const NumericError& e) {
    throw NumericError("grad_check: non-finite evaluation while perturbing '" + name + "': " + e.what());
  }
}

}  // namespace

GradCheckReport grad_check(const std::string& op_name, ParamSet& params,
                           const std::function<Tensor()>& loss_fn, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) throw ParameterError("grad_check: eps must lie in [1e-7, 1e-3]");

  const Tensor loss = loss_fn();
  backward(loss, params);

  GradCheckReport report{op_name, 0.0, {}};
  for (auto& [name, tensor] : params) {
    const std::vector<double> analytic = tensor.grad();
    std::span<double> values = tensor.mutable_data();
    double diff_sq = 0.0;
    double a_sq = 0.0;
    double n_sq = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + eps;
      const double plus = evaluate(loss_fn, name);
      values[i] = original - eps;
      const double minus = evaluate(loss_fn, name);
      values[i] = original;
      const double numeric = (plus - minus) / (2.0 * eps);
      if (!std::isfinite(numeric)) throw NumericError("grad_check: non-finite difference for '" + name + "'");
      diff_sq += (analytic[i] - numeric) * (analytic[i] - numeric);
      a_sq += analytic[i] * analytic[i];
      n_sq += numeric * numeric;
    }
    const double denom = std::sqrt(a_sq) + std::sqrt(n_sq);
    const double rel = denom == 0.0 ? 0.0 : std::sqrt(diff_sq) / denom;
    report.per_parameter[name] = rel;
    report.max_rel_error = std::max(report.max_rel_error, rel);
  }
  params.zero_grad();
  return report;
}

}  // namespace vidmem
