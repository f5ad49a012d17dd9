#pragma once

// Text-guided construction of positive and negative motion samples.
//
// For a target record the 2K records whose text features score highest
// against the target form the latent set; K of them are drawn uniformly
// without replacement as positives. Negatives are the queued embeddings of
// earlier batches, minus anything sharing an id with a positive or the
// target.

#include <cstddef>
#include <deque>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vidmem/dataio/records.hpp"

namespace vidmem::tmccl {

struct QueueEntry {
  std::string id;
  std::vector<double> embedding;  // detached snapshot
};

class NegativeQueue {
 public:
  explicit NegativeQueue(std::size_t capacity = 1024);

  // Enqueues copies of the values; evicts oldest entries past capacity.
  void push(std::string id, std::span<const double> embedding);
  void push(std::string id, const Tensor& embedding);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const std::deque<QueueEntry>& entries() const { return entries_; }
  std::size_t total_enqueued() const { return enqueued_; }
  std::size_t total_evicted() const { return evicted_; }

 private:
  std::size_t capacity_;
  std::deque<QueueEntry> entries_;
  std::size_t enqueued_ = 0;
  std::size_t evicted_ = 0;
};

// Ids of the (up to) 2K pool records with the highest text score against
// the target, best first; ties broken by ascending video_id. The score is
// the raw dot product, or the cosine when `cosine` is set. Records sharing
// the target's id are skipped. Throws DomainError when nothing remains.
std::vector<std::string> text_topk(const dataio::FeatureRecord& target, std::span<const dataio::FeatureRecord> pool,
                                   std::size_t k, bool cosine = false);

struct SampleSets {
  std::string target_id;
  std::vector<std::string> positives;
  std::vector<QueueEntry> negatives;
  // True when the queue offered no usable negative for this target.
  bool no_negatives = false;
};

SampleSets build_sample_sets(const std::string& target_id, std::span<const std::string> latent_set,
                             const NegativeQueue& queue, std::size_t k, std::mt19937_64& rng);

}  // namespace vidmem::tmccl
