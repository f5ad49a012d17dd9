#include "vidmem/summarizer/summarizer.hpp"

#include <algorithm>
#include <cmath>

#include "vidmem/errors.hpp"

namespace vidmem::summarizer {

double score_memorability(const dataio::Matrix& motion, const tmccl::MotionEncoder& encoder) {
  return encoder.score(motion);
}

RectifiedScores rectify(std::span<const double> base, std::span<const double> memorability, double mu) {
  if (base.size() != memorability.size()) {
    throw SchemaError("rectify: " + std::to_string(base.size()) + " base scores vs " +
                      std::to_string(memorability.size()) + " memorability scores");
  }
  if (!(mu >= 0.0)) throw ParameterError("rectify: mu must be >= 0");
  RectifiedScores out;
  out.base.assign(base.begin(), base.end());
  out.memorability.assign(memorability.begin(), memorability.end());
  out.mu = mu;
  out.rectified.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out.rectified[i] = base[i] + mu * memorability[i];
  return out;
}

std::size_t frame_budget(std::size_t total_frames, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ParameterError("budget fraction must be in [0, 1]");
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total_frames) + 1e-9));
}

namespace {

struct State {
  double value = 0.0;
  std::size_t frames = 0;
  std::vector<std::size_t> items;  // ascending clip indices
};

// Sorted id list of a state, for the final tie-break.
std::vector<std::string> sorted_ids(const State& s, std::span<const std::string> ids) {
  std::vector<std::string> out;
  for (std::size_t i : s.items) out.push_back(ids[i]);
  std::sort(out.begin(), out.end());
  return out;
}

bool better(const State& a, const State& b, std::span<const std::string> ids) {
  if (a.value != b.value) return a.value > b.value;
  if (a.frames != b.frames) return a.frames < b.frames;
  return sorted_ids(a, ids) < sorted_ids(b, ids);
}

}  // namespace

SummarySelection knapsack_select(std::span<const std::int64_t> frame_counts, std::span<const double> values,
                                 std::size_t budget, std::span<const std::string> ids) {
  const std::size_t n = frame_counts.size();
  if (values.size() != n) {
    throw SchemaError("knapsack: " + std::to_string(n) + " frame counts vs " + std::to_string(values.size()) +
                      " values");
  }
  std::vector<std::string> index_ids;
  if (ids.empty()) {
    // Zero-padded so that string order matches index order.
    for (std::size_t i = 0; i < n; ++i) {
      std::string s = std::to_string(i);
      index_ids.push_back(std::string(20 - s.size(), '0') + s);
    }
    ids = index_ids;
  } else if (ids.size() != n) {
    throw SchemaError("knapsack: id list length differs from clip count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (frame_counts[i] <= 0) {
      throw SchemaError("knapsack: clip '" + std::string(ids[i]) + "' has non-positive frame count");
    }
    if (!std::isfinite(values[i])) throw NumericError("knapsack: non-finite value for clip '" + ids[i] + "'");
  }

  SummarySelection sel;
  sel.budget = budget;
  const double lowest = n ? *std::min_element(values.begin(), values.end()) : 0.0;
  sel.shift = lowest < 0.0 ? -lowest : 0.0;
  std::vector<double> v(values.begin(), values.end());
  if (sel.shift > 0.0) {
    for (double& x : v) x += sel.shift;
  }

  // dp[c]: best subset of the clips seen so far using at most c frames.
  // Clips are added in index order, so each subset's value is the
  // left-to-right sum of its members.
  std::vector<State> dp(budget + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = static_cast<std::size_t>(frame_counts[i]);
    if (w > budget) continue;
    for (std::size_t c = budget; c >= w; --c) {
      const State& base = dp[c - w];
      State cand;
      cand.value = base.value + v[i];
      cand.frames = base.frames + w;
      if (cand.value < dp[c].value) continue;
      cand.items = base.items;
      cand.items.push_back(i);
      if (better(cand, dp[c], ids)) dp[c] = std::move(cand);
    }
  }
  const State& best = dp[budget];
  sel.selected = best.items;
  sel.total_frames = best.frames;
  sel.objective = best.value;
  for (std::size_t i : best.items) {
    sel.selected_ids.push_back(ids[i]);
    sel.raw_objective += values[i];
  }
  if (ids.data() == index_ids.data()) {
    sel.selected_ids.clear();
    for (std::size_t i : best.items) sel.selected_ids.push_back(std::to_string(i));
  }
  return sel;
}

SummarySelection knapsack_select_fraction(std::span<const std::int64_t> frame_counts,
                                          std::span<const double> values, double budget_fraction,
                                          std::span<const std::string> ids) {
  std::size_t total = 0;
  for (std::int64_t f : frame_counts) total += f > 0 ? static_cast<std::size_t>(f) : 0;
  return knapsack_select(frame_counts, values, frame_budget(total, budget_fraction), ids);
}

SummaryResult summarize_with_scores(const dataio::ClipManifest& manifest, std::span<const double> memorability,
                                    double mu, double budget_fraction) {
  dataio::validate_manifest(manifest);
  std::vector<double> base;
  std::vector<std::int64_t> frames;
  std::vector<std::string> ids;
  for (const auto& clip : manifest.clips) {
    base.push_back(clip.base_importance);
    frames.push_back(static_cast<std::int64_t>(clip.frame_count));
    ids.push_back(clip.clip_id);
  }
  SummaryResult out;
  out.scores = rectify(base, memorability, mu);
  out.selection = knapsack_select(frames, out.scores.rectified, frame_budget(manifest.total_frames, budget_fraction),
                                  ids);
  const auto offsets = manifest.clip_offsets();
  std::set<std::size_t> picked;
  for (std::size_t i : out.selection.selected) {
    for (std::size_t f = 0; f < manifest.clips[i].frame_count; ++f) picked.insert(offsets[i] + f);
  }
  out.eval = metrics::summary_f1(picked, manifest.ground_truth_frames, manifest.total_frames, manifest.video_id);
  return out;
}

SummaryResult summarize(const dataio::ClipManifest& manifest, const tmccl::MotionEncoder& encoder, double mu,
                        double budget_fraction) {
  std::vector<double> mem;
  mem.reserve(manifest.clips.size());
  for (const auto& clip : manifest.clips) mem.push_back(score_memorability(clip.motion_seq, encoder));
  return summarize_with_scores(manifest, mem, mu, budget_fraction);
}

}  // namespace vidmem::summarizer
