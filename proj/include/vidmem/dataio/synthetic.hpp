#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "vidmem/dataio/records.hpp"

namespace vidmem::dataio {

struct SyntheticConfig {
  std::size_t num_records = 256;
  std::size_t n = 8;
  std::size_t d_v = 36;
  std::size_t d_t = 32;
  std::size_t t_m = 16;
  std::size_t d_raw = 24;
  std::size_t latent_dim = 12;
  double text_noise = 0.1;
  double motion_noise = 0.1;
  double frame_noise = 0.5;
  double score_noise = 0.2;
  std::uint64_t seed = 1;

  // Throws ParameterError on non-positive dimensions, negative noise,
  // fewer than two records, or latent_dim larger than d_t or d_raw.
  void validate() const;
};

// Shared linear-Gaussian latent factor model. The text and motion loadings
// have orthogonal columns scaled so that A^T A is a multiple of the
// identity: with zero noise, dot products between records rank identically
// in text space and in motion space.
struct LatentModel {
  std::size_t latent_dim = 0;
  Matrix text_loading;    // d_t x L
  Matrix motion_loading;  // d_raw x L
  Matrix frame_loading;   // d_v x L
  std::vector<double> st_weights;  // L
  std::vector<double> lt_weights;  // L

  // Depends only on (dims, latent_dim, seed).
  static LatentModel create(const SyntheticConfig& cfg);

  std::vector<double> draw_latent(std::mt19937_64& rng) const;
  std::vector<double> text(const std::vector<double>& z, double noise, std::mt19937_64& rng) const;
  Matrix motion(const std::vector<double>& z, std::size_t length, double noise, std::mt19937_64& rng) const;
  Matrix frames(const std::vector<double>& z, std::size_t count, double noise, std::mt19937_64& rng) const;
  // sigmoid(w . z) before label noise
  double true_st(const std::vector<double>& z) const;
  double true_lt(const std::vector<double>& z) const;
};

// Per record: latent z; text = A_t z + text_noise*eps; motion rows =
// A_m z + motion_noise*eps; frames = A_v z + frame_noise*eps;
// st_score = clamp(sigmoid(w.z) + score_noise*eps, 0, 1), lt likewise with
// its own weights. Pure function of cfg.
std::vector<FeatureRecord> generate_synthetic(const SyntheticConfig& cfg);

}  // namespace vidmem::dataio
