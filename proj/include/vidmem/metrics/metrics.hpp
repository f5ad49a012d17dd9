#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace vidmem::metrics {

// 1-based ranks; tied values share the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman rank correlation. Without ties this is
//   1 - 6 * sum(d_i^2) / (N (N^2 - 1)),  d_i = rank(pred_i) - rank(gt_i);
// with ties it is the Pearson correlation of the average ranks.
// Throws DimensionError on length mismatch and UndefinedMetricError when
// N < 2 or either side is constant.
double spearman_rc(std::span<const double> pred, std::span<const double> gt);

struct VideoSummaryScore {
  std::string video_id;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when the predicted or ground-truth summary was empty.
  bool degenerate = false;
};

struct SummaryEval {
  double precision = 0.0;  // means over videos
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<VideoSummaryScore> per_video;
};

// Frame-overlap precision/recall/F1 for one video. Frames must lie in
// [0, total_frames); throws RangeError otherwise.
VideoSummaryScore summary_f1(const std::set<std::size_t>& pred, const std::set<std::size_t>& gt,
                             std::size_t total_frames, std::string video_id = {});

// Dataset-level score: the mean of per-video values.
SummaryEval aggregate(std::vector<VideoSummaryScore> per_video);

}  // namespace vidmem::metrics
