#include "vidmem/tmccl/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "vidmem/errors.hpp"
#include "vidmem/numerics/ops.hpp"
#include "vidmem/numerics/optim.hpp"
#include "vidmem/tmccl/loss.hpp"
#include "vidmem/tmccl/sample_sets.hpp"

namespace vidmem::tmccl {

using nlohmann::json;

void TrainConfig::validate() const {
  if (k == 0) throw ConfigError("train: K must be >= 1");
  if (queue_capacity == 0) throw ConfigError("train: queue capacity must be >= 1");
  if (!(tau > 0.0)) throw ConfigError("train: tau must be > 0");
  if (!(lambda >= 0.0)) throw ConfigError("train: lambda must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("train: lr must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("train: weight_decay must be >= 0");
  if (step_epochs <= 0) throw ConfigError("train: step_epochs must be >= 1");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("train: lr_decay must be in (0, 1]");
  if (batch == 0) throw ConfigError("train: batch must be >= 1");
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
}

namespace {

struct Workspace {
  std::vector<Tensor> motion;
  std::vector<std::vector<std::string>> latent;
  std::unordered_map<std::string, std::size_t> index_of;
};

double mean_latent_cosine(const MotionEncoder& enc, const Workspace& ws) {
  NoGradGuard no_grad;
  std::vector<Tensor> z;
  z.reserve(ws.motion.size());
  for (const Tensor& m : ws.motion) z.push_back(enc.embed(enc.features(m)));
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (const std::string& id : ws.latent[i]) {
      const Tensor& other = z[ws.index_of.at(id)];
      double d = 0.0;
      for (std::size_t c = 0; c < other.numel(); ++c) d += z[i].data()[c] * other.data()[c];
      total += d;
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

void check_sets(const SampleSets& sets) {
  for (const std::string& p : sets.positives) {
    if (p == sets.target_id) throw ContractError("positive set contains its target '" + p + "'");
    for (const QueueEntry& n : sets.negatives) {
      if (n.id == p) throw ContractError("'" + p + "' is both positive and negative");
    }
  }
}

}  // namespace

TrainResult train_motion_encoder(std::span<const dataio::FeatureRecord> train, const TrainConfig& cfg,
                                 const MotionEncoderConfig& enc_cfg, bool use_tmccl) {
  cfg.validate();
  if (train.empty()) throw DomainError("train_motion_encoder: empty training set");
  const double lambda = use_tmccl ? cfg.lambda : 0.0;

  MotionEncoderConfig ecfg = enc_cfg;
  ecfg.d_raw = train.front().motion_seq.cols;

  Workspace ws;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].motion_seq.cols != ecfg.d_raw) {
      throw SchemaError("motion width of '" + train[i].video_id + "' differs from '" + train.front().video_id + "'");
    }
    if (!ws.index_of.emplace(train[i].video_id, i).second) {
      throw SchemaError("duplicate video_id '" + train[i].video_id + "' in training set");
    }
    ws.motion.push_back(train[i].motion_seq.to_tensor());
  }
  if (train.size() > 1) {
    for (const auto& rec : train) ws.latent.push_back(text_topk(rec, train, cfg.k, cfg.text_cosine));
  } else {
    ws.latent.assign(1, {});
  }

  TrainResult result{MotionEncoder::create(ecfg, mix_seed(cfg.seed, 0xE4C0DE)), {}, {}, {}, 0.0, 0.0, 0};
  MotionEncoder& enc = result.encoder;
  result.positive_cosine_initial = mean_latent_cosine(enc, ws);

  Adam adam(Adam::Options{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay});
  NegativeQueue queue(cfg.queue_capacity);
  std::vector<std::size_t> order(train.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    adam.set_lr(step_lr(cfg.lr, epoch, cfg.step_epochs, cfg.lr_decay));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, 0x5F0000 + static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const std::uint64_t epoch_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch));

    double loss_sum = 0.0, mse_sum = 0.0, con_sum = 0.0;
    std::size_t step = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch, ++step) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch);
      try {
        std::vector<Tensor> preds, contrastive;
        std::vector<double> gts;
        std::vector<std::pair<std::string, std::vector<double>>> snapshots;
        for (std::size_t b = begin; b < end; ++b) {
          const std::size_t i = order[b];
          std::mt19937_64 rng(mix_seed(epoch_seed, i));
          const auto out = enc.forward(ws.motion[i], true, &rng);
          preds.push_back(out.score);
          gts.push_back(train[i].st_score);
          if (use_tmccl && !ws.latent[i].empty()) {
            const SampleSets sets = build_sample_sets(train[i].video_id, ws.latent[i], queue, cfg.k, rng);
            check_sets(sets);
            if (sets.no_negatives) ++result.empty_negative_steps;
            std::vector<Tensor> pos, neg;
            {
              NoGradGuard no_grad;
              for (const std::string& id : sets.positives) {
                pos.push_back(enc.embed(enc.features(ws.motion[ws.index_of.at(id)])));
              }
            }
            for (const QueueEntry& e : sets.negatives) neg.push_back(Tensor::vector(e.embedding));
            contrastive.push_back(tmccl_loss(out.embedding, pos, neg, cfg.tau));
            snapshots.emplace_back(train[i].video_id,
                                   std::vector<double>(out.embedding.data().begin(), out.embedding.data().end()));
          } else {
            contrastive.push_back(Tensor::scalar(0.0));
          }
        }
        const Tensor pred = ops::concat(preds);
        const Tensor con = ops::concat(contrastive);
        const Tensor loss = overall_loss(pred, gts, con, lambda);
        backward(loss, enc.params());
        adam.step(enc.params());

        const double n = static_cast<double>(end - begin);
        loss_sum += loss.item() * n;
        for (std::size_t j = 0; j < gts.size(); ++j) {
          const double d = pred.data()[j] - gts[j];
          mse_sum += d * d;
          con_sum += con.data()[j];
        }
        for (auto& [id, z] : snapshots) queue.push(std::move(id), z);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", step " + std::to_string(step) +
                           ": " + e.what());
      }
      if (queue.size() > queue.capacity() || queue.total_enqueued() - queue.total_evicted() != queue.size()) {
        throw ContractError("negative queue bookkeeping broken");
      }
    }
    const double total = static_cast<double>(train.size());
    result.epoch_loss.push_back(loss_sum / total);
    result.epoch_mse.push_back(mse_sum / total);
    result.epoch_contrastive.push_back(con_sum / total);
  }
  result.positive_cosine_final = mean_latent_cosine(enc, ws);
  return result;
}

json train_config_to_json(const TrainConfig& cfg) {
  return {{"k", cfg.k},
          {"queue_capacity", cfg.queue_capacity},
          {"tau", cfg.tau},
          {"lambda", cfg.lambda},
          {"lr", cfg.lr},
          {"weight_decay", cfg.weight_decay},
          {"step_epochs", cfg.step_epochs},
          {"lr_decay", cfg.lr_decay},
          {"batch", cfg.batch},
          {"epochs", cfg.epochs},
          {"seed", cfg.seed},
          {"text_cosine", cfg.text_cosine}};
}

TrainConfig train_config_from_json(const json& doc) {
  try {
    TrainConfig cfg;
    cfg.k = doc.at("k").get<std::size_t>();
    cfg.queue_capacity = doc.at("queue_capacity").get<std::size_t>();
    cfg.tau = doc.at("tau").get<double>();
    cfg.lambda = doc.at("lambda").get<double>();
    cfg.lr = doc.at("lr").get<double>();
    cfg.weight_decay = doc.at("weight_decay").get<double>();
    cfg.step_epochs = doc.at("step_epochs").get<int>();
    cfg.lr_decay = doc.at("lr_decay").get<double>();
    cfg.batch = doc.at("batch").get<std::size_t>();
    cfg.epochs = doc.at("epochs").get<int>();
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    cfg.text_cosine = doc.at("text_cosine").get<bool>();
    return cfg;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed train_config: ") + e.what());
  }
}

void save_encoder(const std::filesystem::path& path, const MotionEncoder& encoder, const TrainConfig& cfg) {
  json doc = encoder.to_json();
  doc["train_config"] = train_config_to_json(cfg);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump() << '\n';
}

MotionEncoder load_encoder(const std::filesystem::path& path, TrainConfig* cfg) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (cfg) {
    if (!doc.contains("train_config")) throw SchemaError(path.string() + ": missing train_config");
    *cfg = train_config_from_json(doc.at("train_config"));
  }
  return MotionEncoder::from_json(doc);
}

}  // namespace vidmem::tmccl
