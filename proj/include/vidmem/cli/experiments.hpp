#pragma once

// Reusable experiment drivers behind the CLI commands.

#include <optional>
#include <span>
#include <vector>

#include "vidmem/dataio/split.hpp"
#include "vidmem/dataio/synthetic.hpp"
#include "vidmem/numerics/grad_check.hpp"
#include "vidmem/summarizer/corpus.hpp"
#include "vidmem/tmccl/trainer.hpp"

namespace vidmem::cli {

// Regression-head predictions of the encoder for each record.
std::vector<double> motion_predictions(const tmccl::MotionEncoder& encoder,
                                       std::span<const dataio::FeatureRecord> records);
// Spearman RC of those predictions against st_score; nullopt when undefined.
std::optional<double> motion_rc(const tmccl::MotionEncoder& encoder, std::span<const dataio::FeatureRecord> records);

struct ArmResult {
  tmccl::TrainResult trained;
  std::optional<double> val_rc;
  std::optional<double> test_rc;
};

// Generates the synthetic dataset, splits it with the dataset seed and
// trains one encoder arm on the train split.
ArmResult run_arm(const dataio::SyntheticConfig& data, const dataio::SplitFractions& fractions,
                  const tmccl::TrainConfig& train, const tmccl::MotionEncoderConfig& enc, bool use_tmccl);
ArmResult run_arm(const dataio::DatasetSplit& split, const tmccl::TrainConfig& train,
                  const tmccl::MotionEncoderConfig& enc, bool use_tmccl);

// Mean summary F1 over the corpus for each mu, scoring clips with `encoder`.
std::vector<double> mu_sweep(std::span<const summarizer::CorpusVideo> corpus, const tmccl::MotionEncoder& encoder,
                             std::span<const double> mus, double budget_fraction);

// Finite-difference checks of linear, conv1d (k = 2..5), BiGRU, the
// attention block, the modality heads and the contrastive loss on seeded
// random inputs no wider than 64.
std::vector<GradCheckReport> grad_check_suite(std::uint64_t seed, double eps = 1e-5);

}  // namespace vidmem::cli
