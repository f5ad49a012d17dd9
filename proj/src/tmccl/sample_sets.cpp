#include "vidmem/tmccl/sample_sets.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "vidmem/errors.hpp"

namespace vidmem::tmccl {

NegativeQueue::NegativeQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ParameterError("negative queue capacity must be >= 1");
}

void NegativeQueue::push(std::string id, std::span<const double> embedding) {
  entries_.push_back({std::move(id), std::vector<double>(embedding.begin(), embedding.end())});
  ++enqueued_;
  while (entries_.size() > capacity_) {
    entries_.pop_front();
    ++evicted_;
  }
}

void NegativeQueue::push(std::string id, const Tensor& embedding) { push(std::move(id), embedding.data()); }

std::vector<std::string> text_topk(const dataio::FeatureRecord& target, std::span<const dataio::FeatureRecord> pool,
                                   std::size_t k, bool cosine) {
  if (k == 0) throw ParameterError("text_topk: K must be >= 1");
  const auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  const double target_norm = cosine ? norm(target.text) : 1.0;

  struct Scored {
    double score;
    const std::string* id;
  };
  std::vector<Scored> scored;
  scored.reserve(pool.size());
  for (const auto& rec : pool) {
    if (rec.video_id == target.video_id) continue;
    if (rec.text.size() != target.text.size()) {
      throw DimensionError("text_topk: text width of '" + rec.video_id + "' differs from target '" +
                           target.video_id + "'");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < rec.text.size(); ++i) s += target.text[i] * rec.text[i];
    if (cosine) {
      const double denom = target_norm * norm(rec.text);
      s = denom > 0.0 ? s / denom : 0.0;
    }
    scored.push_back({s, &rec.video_id});
  }
  if (scored.empty()) throw DomainError("text_topk: empty candidate pool for '" + target.video_id + "'");

  const std::size_t keep = std::min(scored.size(), 2 * k);
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    [](const Scored& a, const Scored& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return *a.id < *b.id;
                    });
  std::vector<std::string> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(*scored[i].id);
  return out;
}

SampleSets build_sample_sets(const std::string& target_id, std::span<const std::string> latent_set,
                             const NegativeQueue& queue, std::size_t k, std::mt19937_64& rng) {
  if (k == 0) throw ParameterError("build_sample_sets: K must be >= 1");
  SampleSets sets;
  sets.target_id = target_id;

  std::vector<std::string> candidates;
  for (const auto& id : latent_set) {
    if (id != target_id) candidates.push_back(id);
  }
  // Partial Fisher-Yates: the first `take` slots become a uniform sample
  // without replacement.
  const std::size_t take = std::min(k, candidates.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(rng)]);
  }
  sets.positives.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take));

  std::unordered_set<std::string> excluded(sets.positives.begin(), sets.positives.end());
  excluded.insert(target_id);
  for (const QueueEntry& entry : queue.entries()) {
    if (!excluded.count(entry.id)) sets.negatives.push_back(entry);
  }
  sets.no_negatives = sets.negatives.empty();
  return sets;
}

}  // namespace vidmem::tmccl
