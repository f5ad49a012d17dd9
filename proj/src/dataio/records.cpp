#include "vidmem/dataio/records.hpp"

#include <algorithm>
#include <cmath>

#include "vidmem/errors.hpp"

namespace vidmem::dataio {
namespace {

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::string mismatch(const char* what, std::size_t got, std::size_t want) {
  return std::string(what) + ": got " + std::to_string(got) + ", expected " + std::to_string(want);
}

}  // namespace

Tensor Matrix::to_tensor() const {
  if (rows == 0 || cols == 0) throw DomainError("matrix with an empty axis");
  return Tensor::matrix(rows, cols, values);
}

DatasetDims DatasetDims::of(const FeatureRecord& rec) {
  return DatasetDims{rec.frames.rows, rec.frames.cols, rec.text.size(), rec.motion_seq.rows, rec.motion_seq.cols};
}

std::vector<std::string> validate_record(const FeatureRecord& rec, const DatasetDims& dims) {
  std::vector<std::string> out;
  if (rec.video_id.empty()) out.emplace_back("missing video_id");
  if (rec.frames.rows == 0) out.emplace_back("frame count mismatch: record has no frames");
  if (rec.frames.rows != dims.n) out.push_back(mismatch("frame count mismatch", rec.frames.rows, dims.n));
  if (rec.frames.cols != dims.d_v) out.push_back(mismatch("frame width mismatch", rec.frames.cols, dims.d_v));
  if (rec.text.size() != dims.d_t) out.push_back(mismatch("text width mismatch", rec.text.size(), dims.d_t));
  if (rec.motion_seq.rows != dims.t_m) out.push_back(mismatch("motion length mismatch", rec.motion_seq.rows, dims.t_m));
  if (rec.motion_seq.cols != dims.d_raw) {
    out.push_back(mismatch("motion width mismatch", rec.motion_seq.cols, dims.d_raw));
  }
  if (rec.frames.values.size() != rec.frames.rows * rec.frames.cols ||
      rec.motion_seq.values.size() != rec.motion_seq.rows * rec.motion_seq.cols) {
    out.emplace_back("ragged matrix storage");
  }
  if (!all_finite(rec.frames.values)) out.emplace_back("non-finite feature in frames");
  if (!all_finite(rec.text)) out.emplace_back("non-finite feature in text");
  if (!all_finite(rec.motion_seq.values)) out.emplace_back("non-finite feature in motion_seq");
  if (!(rec.st_score >= 0.0 && rec.st_score <= 1.0)) out.emplace_back("score out of range: st_score");
  if (rec.lt_score && !(*rec.lt_score >= 0.0 && *rec.lt_score <= 1.0)) {
    out.emplace_back("score out of range: lt_score");
  }
  return out;
}

std::vector<std::size_t> ClipManifest::clip_offsets() const {
  std::vector<std::size_t> offsets;
  offsets.reserve(clips.size());
  std::size_t at = 0;
  for (const Clip& c : clips) {
    offsets.push_back(at);
    at += c.frame_count;
  }
  return offsets;
}

void validate_manifest(const ClipManifest& m) {
  const std::string who = "manifest '" + m.video_id + "': ";
  if (m.total_frames == 0) throw SchemaError(who + "total_frames must be positive");
  std::size_t total = 0;
  for (const Clip& c : m.clips) {
    if (c.frame_count == 0) throw SchemaError(who + "clip '" + c.clip_id + "' has no frames");
    if (!std::isfinite(c.base_importance)) throw SchemaError(who + "clip '" + c.clip_id + "' has non-finite base_importance");
    if (!all_finite(c.motion_seq.values)) throw SchemaError(who + "clip '" + c.clip_id + "' has non-finite motion");
    total += c.frame_count;
  }
  if (total != m.total_frames) {
    throw SchemaError(who + "clip frame counts sum to " + std::to_string(total) + " but total_frames is " +
                      std::to_string(m.total_frames));
  }
  if (!m.ground_truth_frames.empty() && *m.ground_truth_frames.rbegin() >= m.total_frames) {
    throw SchemaError(who + "ground-truth frame " + std::to_string(*m.ground_truth_frames.rbegin()) +
                      " outside the video");
  }
}

}  // namespace vidmem::dataio
