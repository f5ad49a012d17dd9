#include "vidmem/cli/experiments.hpp"

#include "vidmem/appearance/attention.hpp"
#include "vidmem/errors.hpp"
#include "vidmem/fusion/fusion.hpp"
#include "vidmem/metrics/metrics.hpp"
#include "vidmem/numerics/ops.hpp"
#include "vidmem/summarizer/summarizer.hpp"
#include "vidmem/tmccl/loss.hpp"

namespace vidmem::cli {

std::vector<double> motion_predictions(const tmccl::MotionEncoder& encoder,
                                       std::span<const dataio::FeatureRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& rec : records) out.push_back(encoder.score(rec.motion_seq));
  return out;
}

std::optional<double> motion_rc(const tmccl::MotionEncoder& encoder, std::span<const dataio::FeatureRecord> records) {
  std::vector<double> gt;
  for (const auto& rec : records) gt.push_back(rec.st_score);
  try {
    return metrics::spearman_rc(motion_predictions(encoder, records), gt);
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
}

ArmResult run_arm(const dataio::DatasetSplit& split, const tmccl::TrainConfig& train,
                  const tmccl::MotionEncoderConfig& enc, bool use_tmccl) {
  ArmResult r{tmccl::train_motion_encoder(split.train, train, enc, use_tmccl), std::nullopt, std::nullopt};
  r.val_rc = motion_rc(r.trained.encoder, split.val);
  r.test_rc = motion_rc(r.trained.encoder, split.test);
  return r;
}

ArmResult run_arm(const dataio::SyntheticConfig& data, const dataio::SplitFractions& fractions,
                  const tmccl::TrainConfig& train, const tmccl::MotionEncoderConfig& enc, bool use_tmccl) {
  const auto split = dataio::split(dataio::generate_synthetic(data), fractions, data.seed);
  return run_arm(split, train, enc, use_tmccl);
}

std::vector<double> mu_sweep(std::span<const summarizer::CorpusVideo> corpus, const tmccl::MotionEncoder& encoder,
                             std::span<const double> mus, double budget_fraction) {
  std::vector<std::vector<double>> memorability;
  for (const auto& video : corpus) {
    std::vector<double> mem;
    for (const auto& clip : video.manifest.clips) mem.push_back(summarizer::score_memorability(clip.motion_seq, encoder));
    memorability.push_back(std::move(mem));
  }
  std::vector<double> out;
  for (double mu : mus) {
    std::vector<metrics::VideoSummaryScore> per_video;
    for (std::size_t v = 0; v < corpus.size(); ++v) {
      per_video.push_back(
          summarizer::summarize_with_scores(corpus[v].manifest, memorability[v], mu, budget_fraction).eval);
    }
    out.push_back(metrics::aggregate(std::move(per_video)).f1);
  }
  return out;
}

namespace {

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}
  std::vector<double> values(std::size_t n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng_);
    return v;
  }
  Tensor tensor(Shape shape) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), values(n));
  }

 private:
  std::mt19937_64 rng_;
};

// Scalar probe: sum(out * R) with a fixed random R, so no output coordinate
// cancels by symmetry.
Tensor probe(const Tensor& out, const Tensor& weights) { return ops::sum(ops::mul(out, weights)); }

}  // namespace

std::vector<GradCheckReport> grad_check_suite(std::uint64_t seed, double eps) {
  std::vector<GradCheckReport> reports;
  std::uint64_t stream = 0;
  const auto next = [&] { return mix_seed(seed, ++stream); };

  {
    Random rnd(next());
    ParamSet ps(next());
    ps.add_tensor("x", rnd.tensor({5, 7}));
    const Linear lin = Linear::create(ps, "linear", 7, 6);
    const Tensor r = rnd.tensor({5, 6});
    reports.push_back(grad_check("linear", ps, [&] { return probe(lin.forward(ps, ps.get("x")), r); }, eps));
  }
  for (std::size_t k = 2; k <= 5; ++k) {
    Random rnd(next());
    ParamSet ps(next());
    ps.add_tensor("x", rnd.tensor({6, 5}));
    const Conv1d conv = Conv1d::create(ps, "conv", 5, 4, k);
    const Tensor r = rnd.tensor({6, 4});
    reports.push_back(grad_check("conv1d_k" + std::to_string(k), ps,
                                 [&] { return probe(conv.forward(ps, ps.get("x")), r); }, eps));
  }
  {
    Random rnd(next());
    ParamSet ps(next());
    ps.add_tensor("x", rnd.tensor({5, 6}));
    const BiGru gru = BiGru::create(ps, "bigru", 6, 5);
    const Tensor r = rnd.tensor({5, 10});
    reports.push_back(grad_check("bigru", ps, [&] { return probe(gru.forward(ps, ps.get("x")), r); }, eps));
  }
  {
    // Attention over 3 segments of a 27-wide vector, followed by a head.
    Random rnd(next());
    ParamSet ps(next());
    ps.add_tensor("multilevel", rnd.tensor({27}));
    ps.add_tensor("text", rnd.tensor({8}));
    const auto att = appearance::TextVisualAttention::create(ps, "attention", 9, 8, 6, 3);
    const auto head = fusion::ModalityHead::create(ps, "head", 9, 5);
    reports.push_back(grad_check(
        "attention", ps,
        [&] { return head.forward(ps, att.attend(ps, ps.get("multilevel"), ps.get("text")).enhanced); }, eps));
  }
  {
    Random rnd(next());
    ParamSet ps(next());
    appearance::AppearanceConfig cfg{4, 8, 3, 2, 3, 4};
    ps.add_tensor("frames", rnd.tensor({4, 4}));
    const auto enc = appearance::MultiLevelEncoder::create(ps, "appearance", cfg);
    const Tensor r = rnd.tensor({cfg.d_vm()});
    reports.push_back(
        grad_check("multilevel", ps, [&] { return probe(enc.encode(ps, ps.get("frames")).concat, r); }, eps));
  }
  {
    Random rnd(next());
    ParamSet ps(next());
    ps.add_tensor("f_ve", rnd.tensor({12}));
    ps.add_tensor("f_t", rnd.tensor({10}));
    ps.add_tensor("f_m", rnd.tensor({8}));
    const auto hv = fusion::ModalityHead::create(ps, "head_v", 12, 6);
    const auto ht = fusion::ModalityHead::create(ps, "head_t", 10, 6);
    const auto hm = fusion::ModalityHead::create(ps, "head_m", 8, 6);
    const Tensor r = rnd.tensor({3});
    reports.push_back(grad_check(
        "modality_heads", ps,
        [&] {
          const Tensor s = ops::concat({hv.forward(ps, ps.get("f_ve")), ht.forward(ps, ps.get("f_t")),
                                        hm.forward(ps, ps.get("f_m"))});
          return probe(s, r);
        },
        eps));
  }
  {
    Random rnd(next());
    ParamSet ps(next());
    const std::size_t dim = 8, n_pos = 3, n_neg = 4;
    ps.add_tensor("target", rnd.tensor({dim}));
    for (std::size_t i = 0; i < n_pos; ++i) ps.add_tensor("pos" + std::to_string(i), rnd.tensor({dim}));
    for (std::size_t i = 0; i < n_neg; ++i) ps.add_tensor("neg" + std::to_string(i), rnd.tensor({dim}));
    reports.push_back(grad_check(
        "tmccl_loss", ps,
        [&] {
          std::vector<Tensor> pos, neg;
          for (std::size_t i = 0; i < n_pos; ++i) pos.push_back(ops::l2_normalize(ps.get("pos" + std::to_string(i))));
          for (std::size_t i = 0; i < n_neg; ++i) neg.push_back(ops::l2_normalize(ps.get("neg" + std::to_string(i))));
          return tmccl::tmccl_loss(ops::l2_normalize(ps.get("target")), pos, neg, 0.07);
        },
        eps));
  }
  return reports;
}

}  // namespace vidmem::cli
