#include "vidmem/fusion/modality_models.hpp"

#include <algorithm>
#include <numeric>

#include "vidmem/errors.hpp"
#include "vidmem/metrics/metrics.hpp"
#include "vidmem/numerics/ops.hpp"
#include "vidmem/numerics/optim.hpp"

namespace vidmem::fusion {

void ModelConfig::validate() const {
  if (head_hidden == 0) throw ConfigError("model: head_hidden must be >= 1");
  if (epochs < 0) throw ConfigError("model: epochs must be >= 0");
  if (batch == 0) throw ConfigError("model: batch must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("model: lr must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("model: weight_decay must be >= 0");
}

ModelInput make_input(const dataio::FeatureRecord& rec, const tmccl::MotionEncoder& encoder) {
  return {rec.frames.to_tensor(), Tensor::vector(rec.text), Tensor::vector(encoder.feature_vector(rec.motion_seq))};
}

ModalityModels ModalityModels::create(const ModelConfig& cfg, std::size_t d_v, std::size_t d_t, std::size_t d_m) {
  cfg.validate();
  ModalityModels m;
  m.cfg_ = cfg;
  m.cfg_.appearance.d_v = d_v;
  m.cfg_.appearance.d_t = d_t;
  const auto& a = m.cfg_.appearance;
  a.validate();
  m.params_ = ParamSet(mix_seed(cfg.seed, 0xF0510));
  m.encoder_ = appearance::MultiLevelEncoder::create(m.params_, "appearance", a);
  m.attention_ = appearance::TextVisualAttention::create(m.params_, "attention", a.segment_dim(), d_t, a.common_dim,
                                                         a.segments);
  m.head_v_ = ModalityHead::create(m.params_, "head_v", a.segment_dim(), cfg.head_hidden);
  m.head_t_ = ModalityHead::create(m.params_, "head_t", d_t, cfg.head_hidden);
  m.head_m_ = ModalityHead::create(m.params_, "head_m", d_m, cfg.head_hidden);
  return m;
}

ModalityModels::Forward ModalityModels::forward(const ModelInput& in) const {
  Forward out;
  const auto ml = encoder_.encode(params_, in.frames);
  out.attention = attention_.attend(params_, ml.concat, in.text);
  out.s_v = head_v_.forward(params_, out.attention.enhanced);
  out.s_t = head_t_.forward(params_, in.text);
  out.s_m = head_m_.forward(params_, in.motion_features);
  return out;
}

ModalityScores ModalityModels::predict(const ModelInput& in) const {
  NoGradGuard no_grad;
  const Forward f = forward(in);
  return {f.s_v.item(), f.s_t.item(), f.s_m.item()};
}

double target_of(const dataio::FeatureRecord& rec, Target target) {
  if (target == Target::ShortTerm) return rec.st_score;
  if (!rec.lt_score) throw SchemaError("record '" + rec.video_id + "' has no long-term label");
  return *rec.lt_score;
}

ModalityTrainResult train_modality_models(std::span<const dataio::FeatureRecord> train,
                                          const tmccl::MotionEncoder& encoder, const ModelConfig& cfg,
                                          Target target) {
  if (train.empty()) throw DomainError("train_modality_models: empty training set");
  std::vector<ModelInput> inputs;
  std::vector<double> gt;
  for (const auto& rec : train) {
    inputs.push_back(make_input(rec, encoder));
    gt.push_back(target_of(rec, target));
  }
  ModalityTrainResult result{ModalityModels::create(cfg, train.front().frames.cols, train.front().text.size(),
                                                    inputs.front().motion_features.numel()),
                             {}};
  ModalityModels& models = result.models;
  Adam adam(Adam::Options{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay});
  std::vector<std::size_t> order(train.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(mix_seed(cfg.seed, 0xF5F000 + static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch);
      std::vector<Tensor> terms;
      for (std::size_t b = begin; b < end; ++b) {
        const std::size_t i = order[b];
        const auto f = models.forward(inputs[i]);
        const Tensor y = Tensor::scalar(gt[i]);
        terms.push_back(ops::add(ops::add(ops::square(ops::sub(f.s_v, y)), ops::square(ops::sub(f.s_t, y))),
                                 ops::square(ops::sub(f.s_m, y))));
      }
      const Tensor loss = ops::mean(ops::concat(terms));
      backward(loss, models.params());
      adam.step(models.params());
      total += loss.item() * static_cast<double>(end - begin);
    }
    result.epoch_loss.push_back(total / static_cast<double>(train.size()));
  }
  return result;
}

namespace {

std::optional<double> try_rc(std::span<const double> pred, std::span<const double> gt) {
  try {
    return metrics::spearman_rc(pred, gt);
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
}

}  // namespace

PipelineResult run_pipeline(const dataio::DatasetSplit& split, const tmccl::MotionEncoder& encoder,
                            const ModelConfig& cfg, double c, Target target) {
  auto trained = train_modality_models(split.train, encoder, cfg, target);
  const auto score_all = [&](const std::vector<dataio::FeatureRecord>& records, std::vector<double>& gt) {
    std::vector<ModalityScores> out;
    for (const auto& rec : records) {
      out.push_back(trained.models.predict(make_input(rec, encoder)));
      gt.push_back(target_of(rec, target));
    }
    return out;
  };
  std::vector<double> val_gt, test_gt;
  const auto val = score_all(split.val, val_gt);
  const auto test = score_all(split.test, test_gt);

  PipelineResult result;
  result.epoch_loss = std::move(trained.epoch_loss);
  result.selection = select_weights(val, val_gt, c);
  const auto fused = fuse_all(test, result.selection.weights);
  const auto fused_rc = try_rc(fused, test_gt);
  if (!fused_rc) throw DegenerateDataError("fused test scores have undefined Spearman RC");
  result.fused_rc = *fused_rc;
  std::vector<double> sv, st, sm;
  for (const auto& s : test) {
    sv.push_back(s.s_v);
    st.push_back(s.s_t);
    sm.push_back(s.s_m);
  }
  result.rc_v = try_rc(sv, test_gt);
  result.rc_t = try_rc(st, test_gt);
  result.rc_m = try_rc(sm, test_gt);
  return result;
}

}  // namespace vidmem::fusion
