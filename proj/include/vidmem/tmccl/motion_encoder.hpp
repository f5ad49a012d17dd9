#pragma once

// Trainable motion encoder over raw motion descriptor sequences.
//
//   backbone:   [conv1d -> ReLU] x layers -> mean over time   => f_m
//   projection: linear -> ReLU -> linear -> L2 normalize       => z
//   regression: linear -> dropout -> linear -> sigmoid         => score

#include <cstdint>
#include <filesystem>
#include <random>

#include <json.hpp>

#include "vidmem/dataio/records.hpp"
#include "vidmem/numerics/layers.hpp"

namespace vidmem::tmccl {

struct MotionEncoderConfig {
  std::size_t d_raw = 24;
  std::size_t channels = 32;
  std::size_t kernel_size = 3;
  std::size_t layers = 2;
  std::size_t proj_hidden = 32;
  std::size_t proj_dim = 16;
  std::size_t reg_hidden = 16;
  double dropout = 0.5;

  void validate() const;
};

class MotionEncoder {
 public:
  struct Output {
    Tensor features;   // f_m [channels]
    Tensor embedding;  // unit-norm [proj_dim]
    Tensor score;      // [1], in (0, 1)
  };

  static MotionEncoder create(const MotionEncoderConfig& cfg, std::uint64_t seed);

  Tensor features(const Tensor& motion) const;
  Tensor embed(const Tensor& features) const;
  Tensor regress(const Tensor& features, bool training, std::mt19937_64* rng) const;
  Output forward(const Tensor& motion, bool training, std::mt19937_64* rng) const;

  // Inference helpers: no graph, dropout disabled. Throw SchemaError when
  // the motion width differs from the trained d_raw.
  double score(const dataio::Matrix& motion) const;
  std::vector<double> feature_vector(const dataio::Matrix& motion) const;
  std::vector<double> embedding_vector(const dataio::Matrix& motion) const;

  const MotionEncoderConfig& config() const { return cfg_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  nlohmann::json to_json() const;
  // Throws SchemaError when parameter names or shapes do not match the
  // architecture described by the stored config.
  static MotionEncoder from_json(const nlohmann::json& doc);

 private:
  Tensor checked_input(const dataio::Matrix& motion) const;

  MotionEncoderConfig cfg_;
  ParamSet params_;
  std::vector<Conv1d> backbone_;
  Linear proj_in_, proj_out_, reg_in_, reg_out_;
};

}  // namespace vidmem::tmccl
