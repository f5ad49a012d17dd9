#include "vidmem/fusion/fusion.hpp"

#include <cmath>

#include "vidmem/errors.hpp"
#include "vidmem/metrics/metrics.hpp"
#include "vidmem/numerics/ops.hpp"

namespace vidmem::fusion {

ModalityHead ModalityHead::create(ParamSet& params, const std::string& prefix, std::size_t in,
                                  std::size_t hidden_dim) {
  return {Linear::create(params, prefix + ".hidden", in, hidden_dim),
          Linear::create(params, prefix + ".output", hidden_dim, 1)};
}

Tensor ModalityHead::forward(const ParamSet& params, const Tensor& x) const {
  if (x.rank() != 1 || x.numel() != hidden.in) {
    throw ConfigError("head '" + hidden.name + "' expects [" + std::to_string(hidden.in) + "], got " +
                      shape_str(x.shape()));
  }
  return ops::sigmoid(output.forward(params, ops::relu(hidden.forward(params, x))));
}

std::vector<FusionWeights> grid_weights(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw ParameterError("fusion step must be in (0, 1]");
  const double inv = 1.0 / c;
  const long n = std::lround(inv);
  if (std::abs(inv - static_cast<double>(n)) > 1e-9) {
    throw ParameterError("fusion step " + std::to_string(c) + " does not divide 1");
  }
  const double dn = static_cast<double>(n);
  std::vector<FusionWeights> out;
  for (long tv = 0; tv <= n; ++tv) {
    for (long tm = 0; tm <= n; ++tm) {
      // theta_t = (t_v + t_m - N) / N must be within [0, 1].
      const long tt = tv + tm - n;
      if (tt < 0 || tt > n) continue;
      out.push_back({static_cast<double>(n - tv) / dn, static_cast<double>(tt) / dn,
                     static_cast<double>(n - tm) / dn});
    }
  }
  return out;
}

double fuse(const ModalityScores& s, const FusionWeights& w) {
  return w.theta_v * s.s_v + w.theta_t * s.s_t + w.theta_m * s.s_m;
}

std::vector<double> fuse_all(std::span<const ModalityScores> scores, const FusionWeights& w) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(fuse(s, w));
  return out;
}

Selection select_weights(std::span<const ModalityScores> val_scores, std::span<const double> val_gt, double c) {
  if (val_scores.size() != val_gt.size()) {
    throw DimensionError("select_weights: " + std::to_string(val_scores.size()) + " score triples vs " +
                         std::to_string(val_gt.size()) + " targets");
  }
  if (val_scores.empty()) throw DegenerateDataError("select_weights: empty validation set");
  Selection best;
  bool found = false;
  for (const FusionWeights& w : grid_weights(c)) {
    double rc;
    try {
      rc = metrics::spearman_rc(fuse_all(val_scores, w), val_gt);
    } catch (const UndefinedMetricError&) {
      continue;
    }
    ++best.evaluated;
    const bool better =
        !found || rc > best.val_rc ||
        (rc == best.val_rc && (w.theta_v > best.weights.theta_v ||
                               (w.theta_v == best.weights.theta_v && w.theta_t > best.weights.theta_t)));
    if (better) {
      best.weights = w;
      best.val_rc = rc;
      found = true;
    }
  }
  if (!found) throw DegenerateDataError("select_weights: Spearman RC undefined for every grid triple");
  return best;
}

}  // namespace vidmem::fusion
