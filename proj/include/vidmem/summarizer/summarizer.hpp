#pragma once

// Memorability-weighted clip selection for video summaries.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vidmem/dataio/records.hpp"
#include "vidmem/metrics/metrics.hpp"
#include "vidmem/tmccl/motion_encoder.hpp"

namespace vidmem::summarizer {

inline constexpr double kDefaultBudgetFraction = 0.15;

// Regression-head output of the encoder for one clip, in (0, 1).
double score_memorability(const dataio::Matrix& motion, const tmccl::MotionEncoder& encoder);

struct RectifiedScores {
  std::vector<double> base;
  std::vector<double> memorability;
  std::vector<double> rectified;  // base + mu * memorability
  double mu = 0.0;
};

// Throws SchemaError on a length mismatch, ParameterError when mu < 0.
RectifiedScores rectify(std::span<const double> base, std::span<const double> memorability, double mu);

struct SummarySelection {
  std::vector<std::size_t> selected;  // clip indices, ascending
  std::vector<std::string> selected_ids;
  std::size_t total_frames = 0;  // frames of the selected clips
  std::size_t budget = 0;
  // Sum of the knapsack values of the selection (after any shift), added in
  // clip order.
  double objective = 0.0;
  // Sum of the unshifted values of the selection.
  double raw_objective = 0.0;
  // Amount added to every value; nonzero only when some value was negative.
  double shift = 0.0;
};

// floor(fraction * total + 1e-9). Throws ParameterError unless fraction is
// in [0, 1].
std::size_t frame_budget(std::size_t total_frames, double fraction);

// Exact 0-1 knapsack over frame-count capacity. Among subsets of maximal
// value, fewer frames win, then the lexicographically smallest sorted id
// list. `ids` may be empty, in which case clip indices stand in for ids.
// Throws SchemaError when a frame count is <= 0 or lengths disagree.
SummarySelection knapsack_select(std::span<const std::int64_t> frame_counts, std::span<const double> values,
                                 std::size_t budget, std::span<const std::string> ids = {});
SummarySelection knapsack_select_fraction(std::span<const std::int64_t> frame_counts,
                                          std::span<const double> values, double budget_fraction,
                                          std::span<const std::string> ids = {});

struct SummaryResult {
  RectifiedScores scores;
  SummarySelection selection;
  metrics::VideoSummaryScore eval;
};

// Rectifies the manifest's base importances with the given per-clip
// memorability scores, selects clips and scores the frame-level summary
// against the manifest ground truth.
SummaryResult summarize_with_scores(const dataio::ClipManifest& manifest, std::span<const double> memorability,
                                    double mu, double budget_fraction = kDefaultBudgetFraction);

SummaryResult summarize(const dataio::ClipManifest& manifest, const tmccl::MotionEncoder& encoder, double mu,
                        double budget_fraction = kDefaultBudgetFraction);

}  // namespace vidmem::summarizer
