#pragma once

// Seeded synthetic summarization corpus sharing the latent model of the
// memorability dataset, so an encoder trained on one scores the other.
//
// Each clip draws its own latent z. Its motion descriptors come from the
// shared motion loading, its true memorability is sigmoid(w_st . z), and its
// base importance is an independent uniform draw. Ground-truth importance is
//   base_weight * base + (1 - base_weight) * true memorability
// and the ground-truth summary is the knapsack selection on it under the
// frame budget.

#include <cstdint>
#include <vector>

#include "vidmem/dataio/records.hpp"
#include "vidmem/dataio/synthetic.hpp"

namespace vidmem::summarizer {

struct CorpusConfig {
  std::size_t videos = 20;
  std::size_t clips = 20;
  std::size_t min_frames = 20;
  std::size_t max_frames = 100;
  double base_weight = 0.5;
  double budget_fraction = 0.15;
  std::uint64_t seed = 1;

  void validate() const;
};

struct CorpusVideo {
  dataio::ClipManifest manifest;
  std::vector<double> true_memorability;  // per clip
};

std::vector<CorpusVideo> generate_corpus(const dataio::SyntheticConfig& latent_cfg, const CorpusConfig& cfg);

}  // namespace vidmem::summarizer
