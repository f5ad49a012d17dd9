#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "vidmem/numerics/params.hpp"

namespace testing {

inline std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline vidmem::Tensor random_tensor(std::mt19937_64& rng, vidmem::Shape shape, bool grad = false) {
  const std::size_t n = vidmem::shape_numel(shape);
  return vidmem::Tensor(std::move(shape), uniform(rng, n), grad);
}

// Central differences over every element of every parameter, written
// independently of the library's grad_check.
inline std::vector<double> numeric_grad(vidmem::ParamSet& params, const std::string& name,
                                        const std::function<double()>& f, double eps = 1e-6) {
  auto values = params.get(name).mutable_data();
  std::vector<double> g(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double keep = values[i];
    values[i] = keep + eps;
    const double up = f();
    values[i] = keep - eps;
    const double down = f();
    values[i] = keep;
    g[i] = (up - down) / (2 * eps);
  }
  return g;
}

inline double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(na) + std::sqrt(nb);
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

}  // namespace testing
