#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vidmem/numerics/tensor.hpp"

namespace vidmem::dataio {

// Plain row-major matrix as ingested. Unlike Tensor it may hold non-finite
// values so that validation can report them.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  // Throws NumericError on non-finite entries, DomainError when empty.
  Tensor to_tensor() const;
  bool operator==(const Matrix&) const = default;
};

struct FeatureRecord {
  std::string video_id;
  Matrix frames;              // n x D_v frame appearance features
  std::vector<double> text;   // D_t sentence feature
  Matrix motion_seq;          // T_m x D_raw raw motion descriptors
  double st_score = 0.0;      // short-term memorability in [0, 1]
  std::optional<double> lt_score;
  std::optional<std::string> caption;

  bool operator==(const FeatureRecord&) const = default;
};

struct DatasetDims {
  std::size_t n = 8;
  std::size_t d_v = 0;
  std::size_t d_t = 0;
  std::size_t t_m = 0;
  std::size_t d_raw = 0;

  static DatasetDims of(const FeatureRecord& rec);
  bool operator==(const DatasetDims&) const = default;
};

// Every violated invariant of `rec` against `dims`; empty when conforming.
// Messages start with a stable tag: "frame count mismatch", "non-finite
// feature", "score out of range", ...
std::vector<std::string> validate_record(const FeatureRecord& rec, const DatasetDims& dims);

struct Clip {
  std::string clip_id;
  std::size_t frame_count = 0;
  double base_importance = 0.0;
  Matrix motion_seq;

  bool operator==(const Clip&) const = default;
};

struct ClipManifest {
  std::string video_id;
  std::size_t total_frames = 0;
  std::vector<Clip> clips;
  std::set<std::size_t> ground_truth_frames;

  // First frame index of each clip, clips laid out back to back.
  std::vector<std::size_t> clip_offsets() const;
  bool operator==(const ClipManifest&) const = default;
};

// Throws SchemaError naming the video when frame counts do not add up, a
// clip is empty, or ground-truth frames fall outside the video.
void validate_manifest(const ClipManifest& manifest);

}  // namespace vidmem::dataio
