#include "vidmem/summarizer/corpus.hpp"

#include <cstdio>

#include "vidmem/errors.hpp"
#include "vidmem/numerics/params.hpp"
#include "vidmem/summarizer/summarizer.hpp"

namespace vidmem::summarizer {

void CorpusConfig::validate() const {
  if (videos == 0 || clips == 0) throw ParameterError("corpus: videos and clips must be >= 1");
  if (min_frames == 0 || min_frames > max_frames) throw ParameterError("corpus: need 1 <= min_frames <= max_frames");
  if (!(base_weight >= 0.0 && base_weight <= 1.0)) throw ParameterError("corpus: base_weight must be in [0, 1]");
  if (!(budget_fraction >= 0.0 && budget_fraction <= 1.0)) {
    throw ParameterError("corpus: budget_fraction must be in [0, 1]");
  }
}

std::vector<CorpusVideo> generate_corpus(const dataio::SyntheticConfig& latent_cfg, const CorpusConfig& cfg) {
  latent_cfg.validate();
  cfg.validate();
  const auto model = dataio::LatentModel::create(latent_cfg);
  std::vector<CorpusVideo> corpus;
  for (std::size_t v = 0; v < cfg.videos; ++v) {
    std::mt19937_64 rng(mix_seed(cfg.seed, 0xC0A9000ULL + v));
    std::uniform_int_distribution<std::size_t> length(cfg.min_frames, cfg.max_frames);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CorpusVideo video;
    char name[32];
    std::snprintf(name, sizeof name, "sum%03zu", v);
    video.manifest.video_id = name;
    std::vector<double> gt_importance;
    std::vector<std::int64_t> frames;
    std::vector<std::string> ids;
    for (std::size_t c = 0; c < cfg.clips; ++c) {
      dataio::Clip clip;
      std::snprintf(name, sizeof name, "clip%03zu", c);
      clip.clip_id = name;
      clip.frame_count = length(rng);
      const auto z = model.draw_latent(rng);
      clip.motion_seq = model.motion(z, latent_cfg.t_m, latent_cfg.motion_noise, rng);
      clip.base_importance = unit(rng);
      const double mem = model.true_st(z);
      video.true_memorability.push_back(mem);
      gt_importance.push_back(cfg.base_weight * clip.base_importance + (1.0 - cfg.base_weight) * mem);
      frames.push_back(static_cast<std::int64_t>(clip.frame_count));
      ids.push_back(clip.clip_id);
      video.manifest.total_frames += clip.frame_count;
      video.manifest.clips.push_back(std::move(clip));
    }
    const auto gt = knapsack_select_fraction(frames, gt_importance, cfg.budget_fraction, ids);
    const auto offsets = video.manifest.clip_offsets();
    for (std::size_t i : gt.selected) {
      for (std::size_t f = 0; f < video.manifest.clips[i].frame_count; ++f) {
        video.manifest.ground_truth_frames.insert(offsets[i] + f);
      }
    }
    corpus.push_back(std::move(video));
  }
  return corpus;
}

}  // namespace vidmem::summarizer
