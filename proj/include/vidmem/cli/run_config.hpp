#pragma once

// Flat key=value run configuration. Every key has a default; unknown keys
// and malformed values raise ConfigError.
//
// File syntax: one `key = value` per line, `#` starts a comment, blank lines
// are ignored. Lists are comma separated.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidmem/dataio/split.hpp"
#include "vidmem/dataio/synthetic.hpp"
#include "vidmem/fusion/modality_models.hpp"
#include "vidmem/summarizer/corpus.hpp"
#include "vidmem/tmccl/trainer.hpp"

namespace vidmem::cli {

struct KeyInfo {
  std::string name;
  std::string default_value;
  std::string doc;
};

const std::vector<KeyInfo>& config_keys();

class RunConfig {
 public:
  RunConfig();  // all defaults

  void load_file(const std::filesystem::path& path);
  // Accepts "key=value" as well.
  void set(const std::string& key, const std::string& value);
  void set_assignment(const std::string& assignment);

  const std::string& raw(const std::string& key) const;
  std::string get_string(const std::string& key) const { return raw(key); }
  long long get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::uint64_t> get_u64_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  std::uint64_t seed() const { return get_u64("seed"); }

  dataio::SyntheticConfig synthetic() const;
  dataio::SplitFractions split_fractions() const;
  tmccl::TrainConfig train() const;
  tmccl::MotionEncoderConfig encoder() const;
  fusion::ModelConfig model() const;
  summarizer::CorpusConfig corpus() const;

  // Builds every typed config once; throws ConfigError on the first bad value.
  void validate() const;

  nlohmann::json to_json() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace vidmem::cli
