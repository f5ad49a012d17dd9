#include "vidmem/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vidmem/errors.hpp"

namespace vidmem::metrics {
namespace {

bool has_ties(std::span<const double> ranks) {
  for (double r : ranks) {
    if (r != std::floor(r)) return true;
  }
  // Integral average ranks can still hide ties (e.g. three equal values).
  std::vector<double> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman_rc(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size()) {
    throw DimensionError("spearman_rc: length mismatch " + std::to_string(pred.size()) + " vs " +
                         std::to_string(gt.size()));
  }
  if (pred.size() < 2) throw UndefinedMetricError("spearman_rc: needs at least 2 points");
  for (double v : pred) {
    if (!std::isfinite(v)) throw NumericError("spearman_rc: non-finite prediction");
  }
  for (double v : gt) {
    if (!std::isfinite(v)) throw NumericError("spearman_rc: non-finite ground truth");
  }
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (constant(pred) || constant(gt)) throw UndefinedMetricError("spearman_rc: constant input");

  const std::vector<double> rp = average_ranks(pred);
  const std::vector<double> rg = average_ranks(gt);
  if (has_ties(rp) || has_ties(rg)) return std::clamp(pearson(rp, rg), -1.0, 1.0);

  const double n = static_cast<double>(pred.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < rp.size(); ++i) d2 += (rp[i] - rg[i]) * (rp[i] - rg[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

VideoSummaryScore summary_f1(const std::set<std::size_t>& pred, const std::set<std::size_t>& gt,
                             std::size_t total_frames, std::string video_id) {
  const auto check = [&](const std::set<std::size_t>& frames, const char* which) {
    if (!frames.empty() && *frames.rbegin() >= total_frames) {
      throw RangeError(std::string("summary_f1: ") + which + " frame " + std::to_string(*frames.rbegin()) +
                       " outside [0, " + std::to_string(total_frames) + ")" +
                       (video_id.empty() ? "" : " for video '" + video_id + "'"));
    }
  };
  check(pred, "predicted");
  check(gt, "ground-truth");

  VideoSummaryScore score;
  score.video_id = std::move(video_id);
  if (pred.empty() || gt.empty()) {
    score.degenerate = true;
    return score;
  }
  std::size_t overlap = 0;
  for (std::size_t f : pred) overlap += gt.count(f);
  score.precision = static_cast<double>(overlap) / static_cast<double>(pred.size());
  score.recall = static_cast<double>(overlap) / static_cast<double>(gt.size());
  const double denom = score.precision + score.recall;
  score.f1 = denom == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / denom;
  return score;
}

SummaryEval aggregate(std::vector<VideoSummaryScore> per_video) {
  SummaryEval eval;
  if (!per_video.empty()) {
    for (const auto& v : per_video) {
      eval.precision += v.precision;
      eval.recall += v.recall;
      eval.f1 += v.f1;
    }
    const double n = static_cast<double>(per_video.size());
    eval.precision /= n;
    eval.recall /= n;
    eval.f1 /= n;
  }
  eval.per_video = std::move(per_video);
  return eval;
}

}  // namespace vidmem::metrics
