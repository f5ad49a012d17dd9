#pragma once

// The three per-modality predictors feeding the fusion stage:
//   appearance: multi-level encoding -> text-visual attention -> head
//   text:       head on the sentence feature
//   motion:     head on the frozen motion-encoder backbone feature f_m

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vidmem/appearance/attention.hpp"
#include "vidmem/dataio/split.hpp"
#include "vidmem/fusion/fusion.hpp"
#include "vidmem/tmccl/motion_encoder.hpp"

namespace vidmem::fusion {

enum class Target { ShortTerm, LongTerm };

struct ModelConfig {
  // d_v and d_t are taken from the data.
  appearance::AppearanceConfig appearance{0, 0, 18, 9, 9, 16};
  std::size_t head_hidden = 32;
  int epochs = 40;
  std::size_t batch = 16;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::uint64_t seed = 1;

  void validate() const;
};

// Model inputs of one record, with the motion feature already extracted.
struct ModelInput {
  Tensor frames;
  Tensor text;
  Tensor motion_features;
};

ModelInput make_input(const dataio::FeatureRecord& rec, const tmccl::MotionEncoder& encoder);

class ModalityModels {
 public:
  struct Forward {
    Tensor s_v, s_t, s_m;
    appearance::AttentionOutput attention;
  };

  static ModalityModels create(const ModelConfig& cfg, std::size_t d_v, std::size_t d_t, std::size_t d_m);

  Forward forward(const ModelInput& in) const;
  ModalityScores predict(const ModelInput& in) const;

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

 private:
  ModelConfig cfg_;
  ParamSet params_;
  appearance::MultiLevelEncoder encoder_;
  appearance::TextVisualAttention attention_;
  ModalityHead head_v_, head_t_, head_m_;
};

struct ModalityTrainResult {
  ModalityModels models;
  std::vector<double> epoch_loss;  // summed per-modality MSE, mean per record
};

// Fits the three predictors jointly on the summed per-modality squared
// error; the heads share no parameters, so this equals separate MSE fits.
// The motion encoder stays frozen. Throws SchemaError when a LongTerm target
// is missing its label.
ModalityTrainResult train_modality_models(std::span<const dataio::FeatureRecord> train,
                                          const tmccl::MotionEncoder& encoder, const ModelConfig& cfg, Target target);

double target_of(const dataio::FeatureRecord& rec, Target target);

struct PipelineResult {
  Selection selection;
  double fused_rc = 0.0;                  // test split, selected weights
  std::optional<double> rc_v, rc_t, rc_m;  // test split, single modality
  std::vector<double> epoch_loss;
};

// Trains the modality models on split.train, selects fusion weights on
// split.val with grid step c, and scores split.test.
PipelineResult run_pipeline(const dataio::DatasetSplit& split, const tmccl::MotionEncoder& encoder,
                            const ModelConfig& cfg, double c, Target target);

}  // namespace vidmem::fusion
