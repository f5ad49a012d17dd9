#include "vidmem/numerics/optim.hpp"

#include <cmath>

#include "vidmem/errors.hpp"

namespace vidmem {

void Adam::step(ParamSet& params) {
  ++steps_;
  const double bias1 = 1.0 - std::pow(options_.beta1, static_cast<double>(steps_));
  const double bias2 = 1.0 - std::pow(options_.beta2, static_cast<double>(steps_));
  for (auto& [name, tensor] : params) {
    const std::vector<double> grad = tensor.grad();
    std::span<double> values = tensor.mutable_data();
    auto& m = first_[name];
    auto& v = second_[name];
    if (m.empty()) {
      m.assign(values.size(), 0.0);
      v.assign(values.size(), 0.0);
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grad[i] + options_.weight_decay * values[i];
      m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * g;
      v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * g * g;
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      values[i] -= options_.lr * m_hat / (std::sqrt(v_hat) + options_.eps);
      if (!std::isfinite(values[i])) throw NumericError("adam: parameter '" + name + "' became non-finite");
    }
  }
}

double step_lr(double base, int epoch, int step_epochs, double decay) {
  if (step_epochs <= 0) return base;
  return base * std::pow(decay, static_cast<double>(epoch / step_epochs));
}

}  // namespace vidmem
