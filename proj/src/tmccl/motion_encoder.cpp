#include "vidmem/tmccl/motion_encoder.hpp"

#include "vidmem/errors.hpp"

namespace vidmem::tmccl {

using nlohmann::json;

void MotionEncoderConfig::validate() const {
  if (d_raw == 0 || channels == 0 || kernel_size == 0 || layers == 0 || proj_hidden == 0 || proj_dim == 0 ||
      reg_hidden == 0) {
    throw ConfigError("motion encoder: sizes must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("motion encoder: dropout must be in [0, 1)");
}

MotionEncoder MotionEncoder::create(const MotionEncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  MotionEncoder enc;
  enc.cfg_ = cfg;
  enc.params_ = ParamSet(seed);
  std::size_t width = cfg.d_raw;
  for (std::size_t i = 0; i < cfg.layers; ++i) {
    enc.backbone_.push_back(
        Conv1d::create(enc.params_, "backbone.conv" + std::to_string(i), width, cfg.channels, cfg.kernel_size));
    width = cfg.channels;
  }
  enc.proj_in_ = Linear::create(enc.params_, "projection.in", cfg.channels, cfg.proj_hidden);
  enc.proj_out_ = Linear::create(enc.params_, "projection.out", cfg.proj_hidden, cfg.proj_dim);
  enc.reg_in_ = Linear::create(enc.params_, "regression.in", cfg.channels, cfg.reg_hidden);
  enc.reg_out_ = Linear::create(enc.params_, "regression.out", cfg.reg_hidden, 1);
  return enc;
}

Tensor MotionEncoder::features(const Tensor& motion) const {
  if (motion.rank() != 2 || motion.dim(1) != cfg_.d_raw) {
    throw DimensionError("motion encoder expects (T," + std::to_string(cfg_.d_raw) + "), got " +
                         shape_str(motion.shape()));
  }
  Tensor h = motion;
  for (const Conv1d& conv : backbone_) h = ops::relu(conv.forward(params_, h));
  return ops::mean_pool(h);
}

Tensor MotionEncoder::embed(const Tensor& features) const {
  return ops::l2_normalize(proj_out_.forward(params_, ops::relu(proj_in_.forward(params_, features))));
}

Tensor MotionEncoder::regress(const Tensor& features, bool training, std::mt19937_64* rng) const {
  const Tensor hidden = ops::dropout(reg_in_.forward(params_, features), cfg_.dropout, training, rng);
  return ops::sigmoid(reg_out_.forward(params_, hidden));
}

MotionEncoder::Output MotionEncoder::forward(const Tensor& motion, bool training, std::mt19937_64* rng) const {
  Output out;
  out.features = features(motion);
  out.embedding = embed(out.features);
  out.score = regress(out.features, training, rng);
  return out;
}

Tensor MotionEncoder::checked_input(const dataio::Matrix& motion) const {
  if (motion.cols != cfg_.d_raw) {
    throw SchemaError("motion descriptor width " + std::to_string(motion.cols) +
                      " does not match the trained encoder width " + std::to_string(cfg_.d_raw));
  }
  return motion.to_tensor();
}

double MotionEncoder::score(const dataio::Matrix& motion) const {
  NoGradGuard no_grad;
  return regress(features(checked_input(motion)), false, nullptr).item();
}

std::vector<double> MotionEncoder::feature_vector(const dataio::Matrix& motion) const {
  NoGradGuard no_grad;
  const Tensor f = features(checked_input(motion));
  return {f.data().begin(), f.data().end()};
}

std::vector<double> MotionEncoder::embedding_vector(const dataio::Matrix& motion) const {
  NoGradGuard no_grad;
  const Tensor z = embed(features(checked_input(motion)));
  return {z.data().begin(), z.data().end()};
}

json MotionEncoder::to_json() const {
  json doc;
  doc["format"] = "vidmem.motion_encoder/1";
  doc["config"] = {{"d_raw", cfg_.d_raw},           {"channels", cfg_.channels},
                   {"kernel_size", cfg_.kernel_size}, {"layers", cfg_.layers},
                   {"proj_hidden", cfg_.proj_hidden}, {"proj_dim", cfg_.proj_dim},
                   {"reg_hidden", cfg_.reg_hidden},   {"dropout", cfg_.dropout}};
  doc["seed"] = params_.seed();
  json params = json::object();
  for (const auto& [name, t] : params_) {
    params[name] = {{"shape", t.shape()}, {"values", std::vector<double>(t.data().begin(), t.data().end())}};
  }
  doc["parameters"] = std::move(params);
  return doc;
}

MotionEncoder MotionEncoder::from_json(const json& doc) {
  try {
    if (doc.at("format") != "vidmem.motion_encoder/1") throw SchemaError("unsupported encoder format");
    const json& c = doc.at("config");
    MotionEncoderConfig cfg;
    cfg.d_raw = c.at("d_raw").get<std::size_t>();
    cfg.channels = c.at("channels").get<std::size_t>();
    cfg.kernel_size = c.at("kernel_size").get<std::size_t>();
    cfg.layers = c.at("layers").get<std::size_t>();
    cfg.proj_hidden = c.at("proj_hidden").get<std::size_t>();
    cfg.proj_dim = c.at("proj_dim").get<std::size_t>();
    cfg.reg_hidden = c.at("reg_hidden").get<std::size_t>();
    cfg.dropout = c.at("dropout").get<double>();
    MotionEncoder enc = create(cfg, doc.at("seed").get<std::uint64_t>());
    const json& params = doc.at("parameters");
    if (params.size() != enc.params_.size()) throw SchemaError("encoder parameter count mismatch");
    for (auto& [name, tensor] : enc.params_) {
      const json& entry = params.at(name);
      if (entry.at("shape").get<Shape>() != tensor.shape()) {
        throw SchemaError("encoder parameter '" + name + "' has the wrong shape");
      }
      const auto values = entry.at("values").get<std::vector<double>>();
      if (values.size() != tensor.numel()) throw SchemaError("encoder parameter '" + name + "' has the wrong size");
      std::copy(values.begin(), values.end(), tensor.mutable_data().begin());
    }
    return enc;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed encoder document: ") + e.what());
  }
}

}  // namespace vidmem::tmccl
