#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vidmem/dataio/records.hpp"
#include "vidmem/tmccl/motion_encoder.hpp"

namespace vidmem::tmccl {

struct TrainConfig {
  std::size_t k = 8;
  std::size_t queue_capacity = 1024;
  double tau = 0.07;
  double lambda = 0.5;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  int step_epochs = 60;
  double lr_decay = 0.1;
  std::size_t batch = 64;
  int epochs = 200;
  std::uint64_t seed = 1;
  bool text_cosine = false;

  // Throws ConfigError on tau <= 0, lambda < 0, K == 0, and the like.
  void validate() const;
};

struct TrainResult {
  MotionEncoder encoder;
  std::vector<double> epoch_loss;         // mean overall loss per epoch
  std::vector<double> epoch_mse;          // mean squared error part
  std::vector<double> epoch_contrastive;  // mean contrastive part (before lambda)
  // Mean cosine between each training target and its latent set in
  // projection space, before the first and after the last epoch.
  double positive_cosine_initial = 0.0;
  double positive_cosine_final = 0.0;
  // Targets that found no usable negative (queue warm-up).
  std::size_t empty_negative_steps = 0;
};

// Trains a fresh encoder on `train`. With use_tmccl == false lambda is forced
// to 0 and no sample sets are built. Deterministic given cfg.seed. Throws
// NumericError naming epoch and step when the loss stops being finite.
TrainResult train_motion_encoder(std::span<const dataio::FeatureRecord> train, const TrainConfig& cfg,
                                 const MotionEncoderConfig& enc_cfg, bool use_tmccl);

nlohmann::json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& doc);

// Encoder document plus the training configuration under "train_config".
void save_encoder(const std::filesystem::path& path, const MotionEncoder& encoder, const TrainConfig& cfg);
MotionEncoder load_encoder(const std::filesystem::path& path, TrainConfig* cfg = nullptr);

}  // namespace vidmem::tmccl
