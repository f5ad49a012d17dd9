#include "vidmem/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vidmem/cli/experiments.hpp"
#include "vidmem/dataio/dataset_io.hpp"
#include "vidmem/errors.hpp"
#include "vidmem/summarizer/summarizer.hpp"

namespace vidmem::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCommands = {"gen-data", "train", "eval", "summarize", "grad-check", "ablation"};

fs::path path_or(const RunConfig& cfg, const std::string& key, const fs::path& fallback) {
  const std::string& v = cfg.raw(key);
  return v.empty() ? fallback : fs::path(v);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json weights_json(const fusion::FusionWeights& w) {
  return {{"theta_v", w.theta_v}, {"theta_t", w.theta_t}, {"theta_m", w.theta_m}};
}

std::vector<dataio::FeatureRecord> load_nonempty(const fs::path& path) {
  auto records = dataio::load_dataset(path);
  if (records.empty()) throw DegenerateDataError("dataset " + path.string() + " is empty");
  return records;
}

json cmd_gen_data(const RunConfig& cfg, const fs::path& out, json& report) {
  const auto syn = cfg.synthetic();
  const auto records = dataio::generate_synthetic(syn);
  const fs::path data_path = path_or(cfg, "data.path", out / "dataset.jsonl");
  if (data_path.has_parent_path()) fs::create_directories(data_path.parent_path());
  dataio::write_dataset(data_path, records);

  const auto corpus = summarizer::generate_corpus(syn, cfg.corpus());
  const fs::path manifests = path_or(cfg, "summary.manifests", out / "manifests");
  fs::create_directories(manifests);
  for (const auto& video : corpus) dataio::write_manifest(manifests / (video.manifest.video_id + ".json"), video.manifest);

  report["metrics"] = {{"records", records.size()}, {"videos", corpus.size()}};
  return {{"dataset", data_path.string()}, {"manifests", manifests.string()}};
}

json cmd_train(const RunConfig& cfg, const fs::path& out, json& report) {
  const auto records = load_nonempty(path_or(cfg, "data.path", out / "dataset.jsonl"));
  const auto split = dataio::split(records, cfg.split_fractions(), cfg.seed());
  const auto tcfg = cfg.train();
  const bool use_tmccl = cfg.get_bool("train.use_tmccl");
  const auto arm = run_arm(split, tcfg, cfg.encoder(), use_tmccl);

  const fs::path enc_path = path_or(cfg, "encoder.path", out / "encoder.json");
  if (enc_path.has_parent_path()) fs::create_directories(enc_path.parent_path());
  tmccl::save_encoder(enc_path, arm.trained.encoder, tcfg);

  if (arm.trained.empty_negative_steps > 0) {
    std::cerr << "warning: " << arm.trained.empty_negative_steps
              << " training targets had no negatives (queue warm-up); their contrastive term was 0\n";
  }
  report["metrics"] = {{"motion_val_st_rc", optional_json(arm.val_rc)},
                       {"motion_test_st_rc", optional_json(arm.test_rc)},
                       {"positive_cosine_initial", arm.trained.positive_cosine_initial},
                       {"positive_cosine_final", arm.trained.positive_cosine_final}};
  report["loss_traces"] = {{"loss", arm.trained.epoch_loss},
                           {"mse", arm.trained.epoch_mse},
                           {"contrastive", arm.trained.epoch_contrastive}};
  return {{"encoder", enc_path.string()},
          {"use_tmccl", use_tmccl},
          {"train_records", split.train.size()},
          {"empty_negative_steps", arm.trained.empty_negative_steps}};
}

json cmd_eval(const RunConfig& cfg, const fs::path& out, json& report) {
  const auto records = load_nonempty(path_or(cfg, "data.path", out / "dataset.jsonl"));
  const auto split = dataio::split(records, cfg.split_fractions(), cfg.seed());
  const auto encoder = tmccl::load_encoder(path_or(cfg, "encoder.path", out / "encoder.json"));
  const double step = cfg.get_double("fusion.step");
  const auto model_cfg = cfg.model();

  json metrics;
  json details;
  const auto st = fusion::run_pipeline(split, encoder, model_cfg, step, fusion::Target::ShortTerm);
  metrics["st_rc"] = st.fused_rc;
  metrics["st_rc_appearance"] = optional_json(st.rc_v);
  metrics["st_rc_text"] = optional_json(st.rc_t);
  metrics["st_rc_motion_head"] = optional_json(st.rc_m);
  metrics["st_rc_motion_regression"] = optional_json(motion_rc(encoder, split.test));
  metrics["st_val_rc"] = st.selection.val_rc;
  report["fusion_weights"] = weights_json(st.selection.weights);
  report["loss_traces"] = {{"st_models", st.epoch_loss}};
  details["st_triples_evaluated"] = st.selection.evaluated;

  const bool has_lt = std::all_of(records.begin(), records.end(), [](const auto& r) { return r.lt_score.has_value(); });
  if (has_lt) {
    const auto lt = fusion::run_pipeline(split, encoder, model_cfg, step, fusion::Target::LongTerm);
    metrics["lt_rc"] = lt.fused_rc;
    metrics["lt_val_rc"] = lt.selection.val_rc;
    details["lt_fusion_weights"] = weights_json(lt.selection.weights);
    report["loss_traces"]["lt_models"] = lt.epoch_loss;
  }
  report["metrics"] = std::move(metrics);
  details["test_records"] = split.test.size();
  details["val_records"] = split.val.size();
  return details;
}

json cmd_summarize(const RunConfig& cfg, const fs::path& out, json& report) {
  const auto manifests = dataio::load_manifests(path_or(cfg, "summary.manifests", out / "manifests"));
  if (manifests.empty()) throw DegenerateDataError("no clip manifests found");
  const auto encoder = tmccl::load_encoder(path_or(cfg, "encoder.path", out / "encoder.json"));
  const double mu = cfg.get_double("summary.mu");
  const double fraction = cfg.get_double("summary.budget_fraction");

  json videos = json::array();
  std::vector<metrics::VideoSummaryScore> scores;
  for (const auto& m : manifests) {
    const auto r = summarizer::summarize(m, encoder, mu, fraction);
    scores.push_back(r.eval);
    videos.push_back({{"video_id", m.video_id},
                      {"selected", r.selection.selected_ids},
                      {"selected_frames", r.selection.total_frames},
                      {"budget", r.selection.budget},
                      {"objective", r.selection.objective},
                      {"raw_objective", r.selection.raw_objective},
                      {"weight_shift", r.selection.shift},
                      {"precision", r.eval.precision},
                      {"recall", r.eval.recall},
                      {"f1", r.eval.f1},
                      {"degenerate", r.eval.degenerate}});
  }
  const auto agg = metrics::aggregate(std::move(scores));
  report["metrics"] = {{"f1", agg.f1}, {"precision", agg.precision}, {"recall", agg.recall}};
  return {{"mu", mu}, {"budget_fraction", fraction}, {"videos", std::move(videos)}};
}

json cmd_grad_check(const RunConfig& cfg, json& report, int& exit_code) {
  const double tol = cfg.get_double("grad_check.tolerance");
  const auto reports = grad_check_suite(cfg.seed(), cfg.get_double("grad_check.eps"));
  json ops = json::array();
  double worst = 0.0;
  bool ok = true;
  for (const auto& r : reports) {
    const bool pass = r.max_rel_error < tol;
    ok = ok && pass;
    worst = std::max(worst, r.max_rel_error);
    ops.push_back({{"op", r.op_name}, {"max_rel_error", r.max_rel_error}, {"pass", pass}, {"per_parameter", r.per_parameter}});
    if (!pass) std::cerr << "grad-check failed for " << r.op_name << ": " << r.max_rel_error << "\n";
  }
  report["metrics"] = {{"max_rel_error", worst}, {"passed", ok}};
  exit_code = ok ? kExitOk : kExitRuntimeError;
  return {{"ops", std::move(ops)}, {"tolerance", tol}};
}

json cmd_ablation(const RunConfig& cfg, json& report) {
  const auto seeds = cfg.get_u64_list("ablation.seeds");
  if (seeds.empty()) throw ConfigError("ablation.seeds is empty");
  std::vector<std::string> arms;
  {
    std::string list = cfg.raw("ablation.arms");
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream in(list);
    for (std::string a; in >> a;) {
      if (a != "tmccl" && a != "baseline") throw ConfigError("unknown ablation arm '" + a + "'");
      if (std::find(arms.begin(), arms.end(), a) == arms.end()) arms.push_back(a);
    }
  }
  if (arms.empty()) throw ConfigError("ablation.arms is empty");
  const auto mus = cfg.get_double_list("ablation.mus");
  const bool fused = cfg.get_bool("ablation.fused");
  const double fraction = cfg.get_double("summary.budget_fraction");

  json arm_reports = json::object();
  json metrics = json::object();
  json mu_rows = json::array();
  std::vector<std::vector<double>> mu_f1(mus.size());
  for (const auto& arm : arms) {
    json runs = json::array();
    double sum = 0.0, fused_sum = 0.0;
    for (std::uint64_t seed : seeds) {
      RunConfig c = cfg;
      c.set("seed", std::to_string(seed));
      const auto syn = c.synthetic();
      const auto split = dataio::split(dataio::generate_synthetic(syn), c.split_fractions(), seed);
      const auto r = run_arm(split, c.train(), c.encoder(), arm == "tmccl");
      if (!r.test_rc) throw DegenerateDataError("test RC undefined for seed " + std::to_string(seed));
      sum += *r.test_rc;
      json run = {{"seed", seed}, {"motion_test_st_rc", *r.test_rc}, {"motion_val_st_rc", optional_json(r.val_rc)}};
      if (fused) {
        const auto p = fusion::run_pipeline(split, r.trained.encoder, c.model(), c.get_double("fusion.step"),
                                            fusion::Target::ShortTerm);
        fused_sum += p.fused_rc;
        run["fused_test_st_rc"] = p.fused_rc;
        run["fusion_weights"] = weights_json(p.selection.weights);
      }
      // The mu sweep uses the TMCCL encoder when that arm runs, else the baseline.
      if (!mus.empty() && (arm == "tmccl" || std::find(arms.begin(), arms.end(), "tmccl") == arms.end())) {
        const auto corpus = summarizer::generate_corpus(syn, c.corpus());
        const auto f1 = mu_sweep(corpus, r.trained.encoder, mus, fraction);
        for (std::size_t i = 0; i < mus.size(); ++i) mu_f1[i].push_back(f1[i]);
        run["mu_sweep_f1"] = f1;
      }
      runs.push_back(std::move(run));
    }
    const double n = static_cast<double>(seeds.size());
    json summary = {{"mean_motion_test_st_rc", sum / n}, {"runs", std::move(runs)}};
    if (fused) summary["mean_fused_test_st_rc"] = fused_sum / n;
    metrics["mean_st_rc_" + arm] = sum / n;
    arm_reports[arm] = std::move(summary);
  }
  if (arm_reports.contains("tmccl") && arm_reports.contains("baseline")) {
    metrics["delta_st_rc"] = arm_reports["tmccl"]["mean_motion_test_st_rc"].get<double>() -
                             arm_reports["baseline"]["mean_motion_test_st_rc"].get<double>();
    if (fused) {
      metrics["delta_fused_st_rc"] = arm_reports["tmccl"]["mean_fused_test_st_rc"].get<double>() -
                                     arm_reports["baseline"]["mean_fused_test_st_rc"].get<double>();
    }
  }
  for (std::size_t i = 0; i < mus.size(); ++i) {
    double s = 0.0;
    for (double v : mu_f1[i]) s += v;
    mu_rows.push_back({{"mu", mus[i]}, {"mean_f1", s / static_cast<double>(mu_f1[i].size())}});
  }
  report["metrics"] = std::move(metrics);
  return {{"arms", std::move(arm_reports)}, {"mu_sweep", std::move(mu_rows)}, {"seeds", seeds}};
}

}  // namespace

CommandResult run_command(const std::string& command, const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  if (cfg.get_int("threads") != 1) throw ConfigError("only threads = 1 is supported");
  const auto start = std::chrono::steady_clock::now();
  CommandResult result;
  json& report = result.report;
  report["command"] = command;
  report["seed"] = cfg.seed();
  report["config"] = cfg.to_json();
  report["metrics"] = json::object();
  report["fusion_weights"] = nullptr;
  report["loss_traces"] = json::object();
  const fs::path out(out_dir);
  fs::create_directories(out);

  json details;
  if (command == "gen-data") {
    details = cmd_gen_data(cfg, out, report);
  } else if (command == "train") {
    details = cmd_train(cfg, out, report);
  } else if (command == "eval") {
    details = cmd_eval(cfg, out, report);
  } else if (command == "summarize") {
    details = cmd_summarize(cfg, out, report);
  } else if (command == "grad-check") {
    details = cmd_grad_check(cfg, report, result.exit_code);
  } else if (command == "ablation") {
    details = cmd_ablation(cfg, report);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  report["details"] = std::move(details);
  report["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Video memorability training, evaluation and summarization", "vidmem"};
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  app.add_option("command", command, "gen-data | train | eval | summarize | grad-check | ablation")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", overrides, "override one config key (key=value), repeatable");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& o : overrides) cfg.set_assignment(o);
    if (seed) cfg.set("seed", std::to_string(*seed));
    const CommandResult r = run_command(command, cfg, out_dir);
    const fs::path report_path = fs::path(out_dir) / (command + ".json");
    std::ofstream file(report_path);
    if (!file) throw Error("cannot write " + report_path.string());
    file << r.report.dump(2) << '\n';
    out << r.report.dump(2) << '\n';
    return r.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace vidmem::cli
