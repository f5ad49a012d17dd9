#pragma once

#include <functional>
#include <map>
#include <string>

#include "vidmem/numerics/params.hpp"

namespace vidmem {

struct GradCheckReport {
  std::string op_name;
  double max_rel_error = 0.0;
  std::map<std::string, double> per_parameter;
};

// Compares reverse-mode gradients of a scalar built by `loss_fn` against
// central differences (f(p+eps) - f(p-eps)) / (2 eps), one parameter element
// at a time. The per-parameter error is
//   ||g_analytic - g_numeric||_2 / (||g_analytic||_2 + ||g_numeric||_2)
// (0 when both are zero). `loss_fn` must be deterministic and read the
// current values of `params`.
//
// Throws ParameterError when eps is outside [1e-7, 1e-3] and NumericError
// (naming the parameter) when a perturbed evaluation is not finite.
GradCheckReport grad_check(const std::string& op_name, ParamSet& params,
                           const std::function<Tensor()>& loss_fn, double eps = 1e-5);

}  // namespace vidmem
