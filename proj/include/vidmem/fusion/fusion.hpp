#pragma once

// Per-modality score heads and decision-level fusion over a simplex grid.

#include <span>
#include <string>
#include <vector>

#include "vidmem/numerics/layers.hpp"

namespace vidmem::fusion {

struct ModalityScores {
  double s_v = 0.0;
  double s_t = 0.0;
  double s_m = 0.0;
};

struct FusionWeights {
  double theta_v = 1.0;
  double theta_t = 0.0;
  double theta_m = 0.0;
};

// linear -> ReLU -> linear -> sigmoid, one scalar per input vector.
struct ModalityHead {
  Linear hidden;
  Linear output;

  static ModalityHead create(ParamSet& params, const std::string& prefix, std::size_t in, std::size_t hidden_dim);
  // Throws ConfigError when x is not a vector of the head's input width.
  Tensor forward(const ParamSet& params, const Tensor& x) const;
};

// All feasible simplex points of the step-c grid. With N = 1/c, t_v and t_m
// range over 0..N, theta_v = 1 - t_v c, theta_m = 1 - t_m c and
// theta_t = 1 - theta_v - theta_m; triples with a component outside [0, 1]
// are dropped. Components are computed as exact ratios of integers over N.
// Throws ParameterError unless 1/c is (within 1e-9) a positive integer.
std::vector<FusionWeights> grid_weights(double c);

double fuse(const ModalityScores& s, const FusionWeights& w);
std::vector<double> fuse_all(std::span<const ModalityScores> scores, const FusionWeights& w);

struct Selection {
  FusionWeights weights;
  double val_rc = 0.0;
  std::size_t evaluated = 0;  // triples with a defined RC
};

// Grid triple maximizing validation Spearman RC of the fused scores. Ties go
// to the larger theta_v, then the larger theta_t. Triples with undefined RC
// are skipped; DegenerateDataError when none is defined.
Selection select_weights(std::span<const ModalityScores> val_scores, std::span<const double> val_gt, double c);

}  // namespace vidmem::fusion
