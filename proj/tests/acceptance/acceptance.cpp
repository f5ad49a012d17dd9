// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidmem/appearance/attention.hpp"
#include "vidmem/cli/commands.hpp"
#include "vidmem/cli/experiments.hpp"
#include "vidmem/cli/run_config.hpp"
#include "vidmem/errors.hpp"
#include "vidmem/fusion/fusion.hpp"
#include "vidmem/metrics/metrics.hpp"
#include "vidmem/numerics/ops.hpp"
#include "vidmem/summarizer/summarizer.hpp"
#include "vidmem/tmccl/loss.hpp"

using namespace vidmem;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---- 1. gradients -------------------------------------------------------

Outcome gradients() {
  const auto t0 = Clock::now();
  const auto reports = cli::grad_check_suite(1, 1e-5);
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& r : reports) {
    if (r.max_rel_error > worst || worst_name.empty()) {
      worst = std::max(worst, r.max_rel_error);
      worst_name = r.op_name;
    }
  }
  std::vector<std::string> required = {"linear", "conv1d_k2", "conv1d_k3", "conv1d_k4", "conv1d_k5",
                                       "bigru",  "attention", "modality_heads", "tmccl_loss"};
  bool covered = true;
  for (const auto& name : required) {
    covered = covered && std::any_of(reports.begin(), reports.end(), [&](auto& r) { return r.op_name == name; });
  }
  std::ostringstream d;
  d << reports.size() << " checks, max rel error " << worst << " (" << worst_name << "), " << elapsed << " s";
  if (!covered) d << ", missing a required op";
  return {covered && worst < 1e-4 && elapsed < 30.0, d.str()};
}

// ---- 2. metric oracles --------------------------------------------------

double pearson_of_ranks(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t below = 0;
      for (std::size_t j = 0; j < n; ++j) below += v[j] < v[i];
      r[i] = static_cast<double>(below + 1);
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Outcome metric_oracles() {
  std::mt19937_64 rng(25);
  std::uniform_int_distribution<std::size_t> len(2, 64);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = len(rng);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = normal(rng);
      b[i] = (trial % 4) * 0.3 * a[i] + normal(rng);
    }
    worst = std::max(worst, std::abs(metrics::spearman_rc(a, b) - pearson_of_ranks(a, b)));
  }
  const double example = metrics::spearman_rc(std::vector<double>{0.1, 0.4, 0.3, 0.9},
                                              std::vector<double>{0.2, 0.3, 0.5, 0.6});
  std::ostringstream d;
  d << "max |rho - oracle| " << worst << " over 200 vectors, worked example " << example;
  return {worst <= 1e-12 && example == 0.8, d.str()};
}

// ---- 3. knapsack --------------------------------------------------------

Outcome knapsack_exactness() {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> count(1, 15), len(1, 100);
  std::uniform_real_distribution<double> val(0.0, 1.6);
  std::size_t mismatches = 0, over_budget = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = count(rng);
    std::vector<std::int64_t> frames(n);
    std::vector<double> values(n);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      frames[i] = len(rng);
      values[i] = trial % 5 == 0 ? std::round(val(rng) * 4) / 4 : val(rng);
      total += frames[i];
    }
    const double fraction = trial % 2 ? summarizer::kDefaultBudgetFraction : 0.3 + 0.3 * (trial % 3);
    const auto sel = summarizer::knapsack_select_fraction(frames, values, fraction);
    const auto budget = static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(total) + 1e-9));
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::int64_t f = 0;
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1u) {
          f += frames[i];
          v += values[i];
        }
      if (f <= budget) best = std::max(best, v);
    }
    mismatches += sel.objective != best;
    over_budget += static_cast<std::int64_t>(sel.total_frames) > budget;
  }
  std::ostringstream d;
  d << "500 instances, " << mismatches << " objective mismatches, " << over_budget << " over budget";
  return {mismatches == 0 && over_budget == 0, d.str()};
}

// ---- 4. fusion grid -----------------------------------------------------

Outcome fusion_grid() {
  const auto grid = fusion::grid_weights(0.05);
  bool simplex = true;
  for (const auto& w : grid) {
    simplex = simplex && std::abs(w.theta_v + w.theta_t + w.theta_m - 1.0) <= 1e-12;
    for (double x : {w.theta_v, w.theta_t, w.theta_m}) simplex = simplex && x >= 0.0 && x <= 1.0;
  }
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.25);
  std::size_t suboptimal = 0;
  const int sets = 50;
  for (int trial = 0; trial < sets; ++trial) {
    std::vector<fusion::ModalityScores> s;
    std::vector<double> gt;
    for (int i = 0; i < 26; ++i) {
      const double g = u(rng);
      gt.push_back(g);
      auto clamp = [](double x) { return std::clamp(x, 0.0, 1.0); };
      s.push_back({clamp(g + noise(rng)), clamp(g + 1.5 * noise(rng)), clamp(g + 2.0 * noise(rng))});
    }
    const auto sel = fusion::select_weights(s, gt, 0.05);
    double best = -2.0;
    for (const auto& w : grid) {
      std::vector<double> f;
      for (const auto& x : s) f.push_back(w.theta_v * x.s_v + w.theta_t * x.s_t + w.theta_m * x.s_m);
      try {
        best = std::max(best, metrics::spearman_rc(f, gt));
      } catch (const UndefinedMetricError&) {
      }
    }
    suboptimal += sel.val_rc < best;
  }
  std::ostringstream d;
  d << grid.size() << " triples" << (simplex ? "" : " (simplex violated)") << ", selection below grid maximum on "
    << suboptimal << "/" << sets << " validation sets";
  return {grid.size() == 231 && simplex && suboptimal == 0, d.str()};
}

// ---- 5. loss properties -------------------------------------------------

Tensor unit_vector(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(d);
  double s = 0.0;
  for (double& x : v) {
    x = n(rng);
    s += x * x;
  }
  for (double& x : v) x /= std::sqrt(s);
  return Tensor::vector(v);
}

Outcome loss_properties() {
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> count(0, 8), dim(2, 64);
  std::size_t negative = 0, perm = 0, mono = 0, zero = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = dim(rng);
    const double tau = trial % 3 == 0 ? 0.07 : (trial % 3 == 1 ? 0.2 : 1.0);
    const Tensor t = unit_vector(rng, d);
    std::vector<Tensor> pos(1 + count(rng) % 6), neg(count(rng));
    for (auto& p : pos) p = unit_vector(rng, d);
    for (auto& n : neg) n = unit_vector(rng, d);
    const double l = tmccl::tmccl_loss(t, pos, neg, tau).item();
    negative += !(l >= 0.0);
    zero += (l == 0.0) != neg.empty();

    auto pos_p = pos, neg_p = neg;
    std::shuffle(pos_p.begin(), pos_p.end(), rng);
    std::shuffle(neg_p.begin(), neg_p.end(), rng);
    perm += std::abs(tmccl::tmccl_loss(t, pos_p, neg_p, tau).item() - l) > 1e-12 * std::max(1.0, l);

    neg.push_back(unit_vector(rng, d));
    mono += tmccl::tmccl_loss(t, pos, neg, tau).item() < l;
  }
  std::ostringstream d;
  d << "1000 sets: " << negative << " negative, " << zero << " zero-iff violations, " << perm
    << " permutation changes, " << mono << " decreases after adding a negative";
  return {negative == 0 && zero == 0 && perm == 0 && mono == 0, d.str()};
}

// ---- 6. TMCCL ablation --------------------------------------------------

Outcome tmccl_ablation() {
  const auto t0 = Clock::now();
  const cli::RunConfig base;
  double sum_tmccl = 0.0, sum_base = 0.0;
  std::ostringstream d;
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  for (std::uint64_t seed : seeds) {
    cli::RunConfig c = base;
    c.set("seed", std::to_string(seed));
    const auto data = c.synthetic();
    if (data.num_records != 256 || data.text_noise != 0.1 || data.motion_noise != 0.1) {
      return {false, "default dataset configuration drifted from 256 records / noise 0.1"};
    }
    const auto with = cli::run_arm(data, c.split_fractions(), c.train(), c.encoder(), true);
    const auto without = cli::run_arm(data, c.split_fractions(), c.train(), c.encoder(), false);
    if (!with.test_rc || !without.test_rc) return {false, "test RC undefined"};
    sum_tmccl += *with.test_rc;
    sum_base += *without.test_rc;
    d << "seed " << seed << ": " << fmt("%.4f", *with.test_rc) << " vs " << fmt("%.4f", *without.test_rc) << "; ";
  }
  const double n = static_cast<double>(seeds.size());
  const double delta = (sum_tmccl - sum_base) / n;
  const double elapsed = seconds_since(t0);
  d << "mean " << fmt("%.4f", sum_tmccl / n) << " vs " << fmt("%.4f", sum_base / n) << ", delta "
    << fmt("%+.4f", delta) << ", " << fmt("%.1f", elapsed) << " s";
  return {delta >= 0.02 && elapsed < 300.0, d.str()};
}

// ---- 7. MWCVS ablation --------------------------------------------------

Outcome mwcvs_ablation() {
  const auto t0 = Clock::now();
  const cli::RunConfig c;
  const auto data = c.synthetic();
  const auto arm = cli::run_arm(data, c.split_fractions(), c.train(), c.encoder(), true);
  const auto corpus_cfg = c.corpus();
  if (corpus_cfg.videos != 20 || corpus_cfg.clips != 20 || corpus_cfg.base_weight != 0.5) {
    return {false, "default corpus configuration drifted from 20 x 20 clips, 50/50 mix"};
  }
  const auto corpus = summarizer::generate_corpus(data, corpus_cfg);
  const std::vector<double> mus{0.5, 0.0};
  const double fraction = corpus_cfg.budget_fraction;
  const auto f1 = cli::mu_sweep(corpus, arm.trained.encoder, mus, fraction);

  std::size_t differing = 0;
  for (const auto& video : corpus) {
    std::vector<std::int64_t> frames;
    std::vector<double> base, mem;
    for (const auto& clip : video.manifest.clips) {
      frames.push_back(static_cast<std::int64_t>(clip.frame_count));
      base.push_back(clip.base_importance);
      mem.push_back(summarizer::score_memorability(clip.motion_seq, arm.trained.encoder));
    }
    const auto at_zero = summarizer::summarize_with_scores(video.manifest, mem, 0.0, fraction);
    const auto base_only = summarizer::knapsack_select_fraction(frames, base, fraction);
    const bool same = at_zero.selection.selected == base_only.selected &&
                      at_zero.selection.objective == base_only.objective &&
                      at_zero.scores.rectified == base;
    differing += !same;
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << "mean F1 mu=0.5 " << fmt("%.4f", f1[0]) << " vs mu=0 " << fmt("%.4f", f1[1]) << ", " << differing
    << " videos where mu=0 differs from base-only, " << fmt("%.1f", elapsed) << " s";
  return {f1[0] >= f1[1] && differing == 0 && elapsed < 60.0, d.str()};
}

// ---- 8. determinism -----------------------------------------------------

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "vidmem_acceptance_determinism";
  std::vector<nlohmann::json> snapshots;
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    fs::remove_all(dir);
    for (const char* command : {"gen-data", "train", "eval"}) {
      std::ostringstream out, err;
      const int code = cli::main_entry({command, "--out", dir.string()}, out, err);
      if (code != cli::kExitOk) return {false, std::string(command) + " exited with " + std::to_string(code)};
    }
    nlohmann::json snap;
    for (const char* command : {"train", "eval"}) {
      const auto r = read_json(dir / (std::string(command) + ".json"));
      snap[command] = {{"metrics", r["metrics"]}, {"fusion_weights", r["fusion_weights"]},
                       {"loss_traces", r["loss_traces"]}};
    }
    snapshots.push_back(std::move(snap));
  }
  // 17 significant digits round-trip doubles exactly.
  const bool same = snapshots[0].dump() == snapshots[1].dump();
  std::ostringstream d;
  d << "train+eval twice: metric, fusion weight and loss trace fields " << (same ? "identical" : "differ")
    << ", eval st_rc " << snapshots[0]["eval"]["metrics"]["st_rc"].dump();
  return {same, d.str()};
}

// ---- 9. attention invariants --------------------------------------------

Outcome attention_invariants() {
  ParamSet ps(99);
  const std::size_t seg = 10, segments = 9, text_dim = 24;
  const auto att = appearance::TextVisualAttention::create(ps, "att", seg, text_dim, 16, segments);
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> u(-3.0, 3.0), shift(-50.0, 50.0);
  double sum_err = 0.0, shift_err = 0.0, hull_violation = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> f(seg * segments), t(text_dim);
    for (double& x : f) x = u(rng);
    for (double& x : t) x = u(rng);
    const auto out = att.attend(ps, Tensor::vector(f), Tensor::vector(t));
    double total = 0.0;
    for (double a : out.weights.data()) total += a;
    sum_err = std::max(sum_err, std::abs(total - 1.0));

    const Tensor moved = ops::softmax(ops::add_scalar(out.logits, shift(rng)));
    for (std::size_t s = 0; s < segments; ++s) shift_err = std::max(shift_err, std::abs(moved[s] - out.weights[s]));

    for (std::size_t i = 0; i < seg; ++i) {
      double lo = f[i], hi = f[i];
      for (std::size_t s = 1; s < segments; ++s) {
        lo = std::min(lo, f[s * seg + i]);
        hi = std::max(hi, f[s * seg + i]);
      }
      hull_violation = std::max({hull_violation, lo - out.enhanced[i], out.enhanced[i] - hi});
    }
  }
  std::ostringstream d;
  d << "100 inputs: max |sum(alpha) - 1| " << sum_err << ", max shift change " << shift_err
    << ", max hull violation " << std::max(0.0, hull_violation);
  return {sum_err <= 1e-9 && shift_err <= 1e-12 && hull_violation <= 1e-12, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradients},
      {"metric oracles", metric_oracles},
      {"knapsack exactness", knapsack_exactness},
      {"fusion grid", fusion_grid},
      {"loss properties", loss_properties},
      {"TMCCL directional ablation", tmccl_ablation},
      {"MWCVS directional ablation", mwcvs_ablation},
      {"determinism", determinism},
      {"attention invariants", attention_invariants},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
