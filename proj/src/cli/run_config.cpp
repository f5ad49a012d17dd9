#include "vidmem/cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vidmem/errors.hpp"
#include "vidmem/fusion/fusion.hpp"

namespace vidmem::cli {

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = {
      {"seed", "1", "master seed for data, splits, initialization and sampling"},
      {"threads", "1", "worker threads (only 1 is supported)"},

      {"data.path", "", "dataset JSONL; empty means <out>/dataset.jsonl"},
      {"data.num_records", "256", "synthetic records"},
      {"data.n", "8", "frames per record"},
      {"data.d_v", "36", "frame feature width"},
      {"data.d_t", "32", "text feature width"},
      {"data.t_m", "16", "motion sequence length"},
      {"data.d_raw", "24", "motion descriptor width"},
      {"data.latent_dim", "12", "latent factors shared by all modalities"},
      {"data.text_noise", "0.1", "text noise std"},
      {"data.motion_noise", "0.1", "motion noise std"},
      {"data.frame_noise", "0.5", "frame noise std"},
      {"data.score_noise", "0.2", "label noise std"},

      {"split.train", "0.8", "train fraction"},
      {"split.val", "0.1", "validation fraction"},
      {"split.test", "0.1", "test fraction"},

      {"encoder.path", "", "trained encoder JSON; empty means <out>/encoder.json"},
      {"encoder.channels", "32", "motion backbone channels"},
      {"encoder.kernel_size", "3", "motion backbone kernel size"},
      {"encoder.layers", "2", "motion backbone conv layers"},
      {"encoder.proj_hidden", "32", "projection head hidden width"},
      {"encoder.proj_dim", "16", "projection output width"},
      {"encoder.reg_hidden", "16", "regression head hidden width"},
      {"encoder.dropout", "0.5", "regression head dropout rate"},

      {"train.use_tmccl", "true", "add the text-guided contrastive term"},
      {"train.k", "8", "positives per target (latent set holds 2K)"},
      {"train.queue", "1024", "negative queue capacity"},
      {"train.tau", "0.07", "contrastive temperature"},
      {"train.lambda", "0.5", "contrastive weight"},
      {"train.lr", "0.001", "Adam learning rate"},
      {"train.weight_decay", "0.0001", "L2 weight decay"},
      {"train.step_epochs", "60", "StepLR interval in epochs"},
      {"train.lr_decay", "0.1", "StepLR factor"},
      {"train.batch", "16", "batch size"},
      {"train.epochs", "40", "epochs"},
      {"train.text_cosine", "false", "rank text neighbours by cosine instead of dot product"},

      {"model.gru_hidden", "18", "appearance BiGRU hidden width"},
      {"model.conv_channels", "9", "appearance conv channels per kernel size"},
      {"model.segments", "9", "attention segments"},
      {"model.common_dim", "16", "attention common space width"},
      {"model.head_hidden", "32", "modality head hidden width"},
      {"model.epochs", "40", "modality model epochs"},
      {"model.batch", "16", "modality model batch size"},
      {"model.lr", "0.001", "modality model learning rate"},
      {"model.weight_decay", "0.0001", "modality model weight decay"},

      {"fusion.step", "0.05", "fusion weight grid step"},

      {"summary.manifests", "", "manifest file or directory; empty means <out>/manifests"},
      {"summary.mu", "0.5", "memorability weight in rectification"},
      {"summary.budget_fraction", "0.15", "summary frame budget fraction"},
      {"corpus.videos", "20", "synthetic summarization videos"},
      {"corpus.clips", "20", "clips per video"},
      {"corpus.min_frames", "20", "minimum clip length"},
      {"corpus.max_frames", "100", "maximum clip length"},
      {"corpus.base_weight", "0.5", "weight of base importance in the ground truth"},

      {"ablation.seeds", "1,2,3", "seeds for the ablation runs"},
      {"ablation.arms", "tmccl,baseline", "training arms: tmccl, baseline"},
      {"ablation.mus", "1,0.5,0.1,0", "mu values of the summarization sweep"},
      {"ablation.fused", "false", "also train modality models and report fused RC"},

      {"grad_check.eps", "1e-5", "finite-difference step"},
      {"grad_check.tolerance", "1e-4", "maximum accepted relative error"},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  return value;
}

}  // namespace

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) {
      throw ConfigError(path.string() + " line " + std::to_string(number) + ": expected key = value");
    }
    set_assignment(line);
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = value;
}

void RunConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& RunConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

long long RunConfig::get_int(const std::string& key) const { return parse_number<long long>(key, raw(key)); }

std::size_t RunConfig::get_size(const std::string& key) const {
  const long long v = get_int(key);
  if (v < 0) throw ConfigError("config key '" + key + "' must be >= 0");
  return static_cast<std::size_t>(v);
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  return parse_number<std::uint64_t>(key, raw(key));
}

double RunConfig::get_double(const std::string& key) const { return parse_number<double>(key, raw(key)); }

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<std::uint64_t> RunConfig::get_u64_list(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(raw(key))) out.push_back(parse_number<std::uint64_t>(key, item));
  return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) out.push_back(parse_number<double>(key, item));
  return out;
}

dataio::SyntheticConfig RunConfig::synthetic() const {
  dataio::SyntheticConfig c;
  c.num_records = get_size("data.num_records");
  c.n = get_size("data.n");
  c.d_v = get_size("data.d_v");
  c.d_t = get_size("data.d_t");
  c.t_m = get_size("data.t_m");
  c.d_raw = get_size("data.d_raw");
  c.latent_dim = get_size("data.latent_dim");
  c.text_noise = get_double("data.text_noise");
  c.motion_noise = get_double("data.motion_noise");
  c.frame_noise = get_double("data.frame_noise");
  c.score_noise = get_double("data.score_noise");
  c.seed = seed();
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

dataio::SplitFractions RunConfig::split_fractions() const {
  const dataio::SplitFractions f{get_double("split.train"), get_double("split.val"), get_double("split.test")};
  if (f.train < 0 || f.val < 0 || f.test < 0 || std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be non-negative and sum to 1");
  }
  return f;
}

tmccl::TrainConfig RunConfig::train() const {
  tmccl::TrainConfig c;
  c.k = get_size("train.k");
  c.queue_capacity = get_size("train.queue");
  c.tau = get_double("train.tau");
  c.lambda = get_double("train.lambda");
  c.lr = get_double("train.lr");
  c.weight_decay = get_double("train.weight_decay");
  c.step_epochs = static_cast<int>(get_int("train.step_epochs"));
  c.lr_decay = get_double("train.lr_decay");
  c.batch = get_size("train.batch");
  c.epochs = static_cast<int>(get_int("train.epochs"));
  c.seed = seed();
  c.text_cosine = get_bool("train.text_cosine");
  c.validate();
  return c;
}

tmccl::MotionEncoderConfig RunConfig::encoder() const {
  tmccl::MotionEncoderConfig c;
  c.d_raw = get_size("data.d_raw");
  c.channels = get_size("encoder.channels");
  c.kernel_size = get_size("encoder.kernel_size");
  c.layers = get_size("encoder.layers");
  c.proj_hidden = get_size("encoder.proj_hidden");
  c.proj_dim = get_size("encoder.proj_dim");
  c.reg_hidden = get_size("encoder.reg_hidden");
  c.dropout = get_double("encoder.dropout");
  c.validate();
  return c;
}

fusion::ModelConfig RunConfig::model() const {
  fusion::ModelConfig c;
  c.appearance.gru_hidden = get_size("model.gru_hidden");
  c.appearance.conv_channels = get_size("model.conv_channels");
  c.appearance.segments = get_size("model.segments");
  c.appearance.common_dim = get_size("model.common_dim");
  c.head_hidden = get_size("model.head_hidden");
  c.epochs = static_cast<int>(get_int("model.epochs"));
  c.batch = get_size("model.batch");
  c.lr = get_double("model.lr");
  c.weight_decay = get_double("model.weight_decay");
  c.seed = seed();
  c.validate();
  return c;
}

summarizer::CorpusConfig RunConfig::corpus() const {
  summarizer::CorpusConfig c;
  c.videos = get_size("corpus.videos");
  c.clips = get_size("corpus.clips");
  c.min_frames = get_size("corpus.min_frames");
  c.max_frames = get_size("corpus.max_frames");
  c.base_weight = get_double("corpus.base_weight");
  c.budget_fraction = get_double("summary.budget_fraction");
  c.seed = seed();
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

void RunConfig::validate() const {
  synthetic();
  split_fractions();
  train();
  encoder();
  model();
  corpus();
  get_int("threads");
  get_bool("train.use_tmccl");
  get_bool("ablation.fused");
  get_u64_list("ablation.seeds");
  const double mu = get_double("summary.mu");
  if (!(mu >= 0.0)) throw ConfigError("summary.mu must be >= 0");
  for (double m : get_double_list("ablation.mus"))
    if (!(m >= 0.0)) throw ConfigError("ablation.mus entries must be >= 0");
  try {
    fusion::grid_weights(get_double("fusion.step"));
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  get_double("grad_check.eps");
  get_double("grad_check.tolerance");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [k, v] : values_) doc[k] = v;
  return doc;
}

}  // namespace vidmem::cli
