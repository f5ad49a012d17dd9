#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "vidmem/appearance/attention.hpp"
#include "vidmem/appearance/multilevel.hpp"
#include "vidmem/errors.hpp"
#include "vidmem/numerics/ops.hpp"

using namespace vidmem;
using namespace vidmem::appearance;

namespace {

AppearanceConfig small_config() {
  AppearanceConfig c;
  c.d_v = 6;
  c.d_t = 5;
  c.gru_hidden = 3;
  c.conv_channels = 2;
  c.segments = 4;  // d_vm = 6 + 6 + 8 = 20
  c.common_dim = 4;
  return c;
}

// Plain-loop evaluation of the attention block from the raw parameters.
std::vector<double> attention_oracle(const ParamSet& ps, const std::string& p, const std::vector<double>& f,
                                     const std::vector<double>& text, std::size_t segments) {
  auto lin = [&](const std::string& name, const std::vector<double>& x, bool bias) {
    const Tensor& w = ps.get(p + "." + name + ".weight");
    const std::size_t in = w.dim(0), out = w.dim(1);
    std::vector<double> y(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = bias ? ps.get(p + "." + name + ".bias")[o] : 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += x[i] * w.at(i, o);
      y[o] = acc;
    }
    return y;
  };
  auto relu = [](std::vector<double> v) {
    for (double& x : v) x = std::max(0.0, x);
    return v;
  };
  const std::size_t seg = f.size() / segments;
  const auto tp = lin("w_t", relu(lin("u_t", text, true)), true);
  std::vector<double> e(segments);
  for (std::size_t s = 0; s < segments; ++s) {
    const std::vector<double> piece(f.begin() + s * seg, f.begin() + (s + 1) * seg);
    auto vp = lin("w_v", relu(lin("u_v", piece, true)), true);
    for (std::size_t i = 0; i < vp.size(); ++i) vp[i] = std::tanh(vp[i] + tp[i]);
    e[s] = lin("score", vp, false)[0];
  }
  const double m = *std::max_element(e.begin(), e.end());
  double z = 0.0;
  for (double& x : e) z += (x = std::exp(x - m));
  std::vector<double> out(seg, 0.0);
  for (std::size_t s = 0; s < segments; ++s)
    for (std::size_t i = 0; i < seg; ++i) out[i] += e[s] / z * f[s * seg + i];
  return out;
}

}  // namespace

TEST_CASE("global encoding is the frame mean") {
  const Tensor frames = Tensor::matrix(2, 2, {1, 2, 3, 4});
  const Tensor g = encode_global(frames);
  CHECK(g.shape() == Shape{2});
  CHECK(g[0] == 2.0);
  CHECK(g[1] == 3.0);
  const Tensor one = encode_global(Tensor::matrix(1, 3, {0.5, -1, 2}));
  CHECK(std::vector<double>(one.data().begin(), one.data().end()) == std::vector<double>{0.5, -1, 2});
}

TEST_CASE("multi-level width arithmetic and validation") {
  AppearanceConfig def;
  CHECK(def.d_vm() == 4608);
  CHECK(def.segment_dim() == 512);
  def.validate();

  AppearanceConfig small;
  small.d_v = 18;
  small.gru_hidden = 18;
  small.conv_channels = 9;
  CHECK(small.d_vm() == 90);
  CHECK(small.segment_dim() == 10);
  small.validate();

  AppearanceConfig bad;
  bad.segments = 7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = AppearanceConfig{};
  bad.gru_hidden = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("multi-level encoding shapes and part layout") {
  const auto cfg = small_config();
  ParamSet ps(3);
  const auto enc = MultiLevelEncoder::create(ps, "app", cfg);
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 2u, 8u}) {
    const Tensor frames = testing::random_tensor(rng, {n, cfg.d_v});
    const auto f = enc.encode(ps, frames);
    CHECK(f.global_part.shape() == Shape{cfg.d_v});
    CHECK(f.temporal_part.shape() == Shape{2 * cfg.gru_hidden});
    CHECK(f.local_part.shape() == Shape{4 * cfg.conv_channels});
    REQUIRE(f.concat.shape() == Shape{cfg.d_vm()});
    std::vector<double> joined;
    for (const Tensor* part : {&f.global_part, &f.temporal_part, &f.local_part})
      joined.insert(joined.end(), part->data().begin(), part->data().end());
    CHECK(joined == std::vector<double>(f.concat.data().begin(), f.concat.data().end()));
    for (double v : f.local_part.data()) CHECK(v >= 0.0);
  }
}

TEST_CASE("global part ignores frame order, temporal part does not") {
  const auto cfg = small_config();
  ParamSet ps(4);
  const auto enc = MultiLevelEncoder::create(ps, "app", cfg);
  std::mt19937_64 rng(2);
  const Tensor frames = testing::random_tensor(rng, {6, cfg.d_v});
  const Tensor flipped = ops::reverse_rows(frames);
  const auto a = enc.encode(ps, frames);
  const auto b = enc.encode(ps, flipped);
  for (std::size_t i = 0; i < cfg.d_v; ++i) CHECK(a.global_part[i] == doctest::Approx(b.global_part[i]).epsilon(1e-14));
  double diff = 0.0;
  for (std::size_t i = 0; i < a.temporal_part.numel(); ++i) diff += std::abs(a.temporal_part[i] - b.temporal_part[i]);
  CHECK(diff > 1e-6);
}

TEST_CASE("attention matches a plain-loop oracle") {
  ParamSet ps(5);
  const auto att = TextVisualAttention::create(ps, "att", 5, 7, 4, 4);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = testing::uniform(rng, 20, -2, 2);
    const auto t = testing::uniform(rng, 7, -2, 2);
    const auto out = att.attend(ps, Tensor::vector(f), Tensor::vector(t));
    const auto expect = attention_oracle(ps, "att", f, t, 4);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(out.enhanced[i] - expect[i]) < 1e-12);
  }
}

TEST_CASE("attention weights form a distribution and the output stays in the segment hull") {
  ParamSet ps(6);
  const auto att = TextVisualAttention::create(ps, "att", 5, 7, 4, 4);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = testing::uniform(rng, 20, -3, 3);
    const auto out = att.attend(ps, Tensor::vector(f), testing::random_tensor(rng, {7}));
    double total = 0.0;
    for (double a : out.weights.data()) {
      CHECK(a >= 0.0);
      total += a;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    for (std::size_t i = 0; i < 5; ++i) {
      double lo = f[i], hi = f[i];
      for (std::size_t s = 1; s < 4; ++s) {
        lo = std::min(lo, f[s * 5 + i]);
        hi = std::max(hi, f[s * 5 + i]);
      }
      CHECK(out.enhanced[i] >= lo - 1e-12);
      CHECK(out.enhanced[i] <= hi + 1e-12);
    }
  }
}

TEST_CASE("attention is uniform when the score vector is zero and softmax ignores logit shifts") {
  ParamSet ps(7);
  const auto att = TextVisualAttention::create(ps, "att", 5, 7, 4, 4);
  for (double& w : ps.get("att.score.weight").mutable_data()) w = 0.0;
  std::mt19937_64 rng(5);
  const auto f = testing::uniform(rng, 20);
  const auto out = att.attend(ps, Tensor::vector(f), testing::random_tensor(rng, {7}));
  for (double a : out.weights.data()) CHECK(a == doctest::Approx(0.25).epsilon(1e-15));
  for (std::size_t i = 0; i < 5; ++i) {
    const double mean = (f[i] + f[5 + i] + f[10 + i] + f[15 + i]) / 4.0;
    CHECK(std::abs(out.enhanced[i] - mean) < 1e-12);
  }

  const Tensor logits = Tensor::vector(testing::uniform(rng, 6, -5, 5));
  const Tensor shifted = ops::add_scalar(logits, 3.25);
  const Tensor a = ops::softmax(logits), b = ops::softmax(shifted);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("attention rejects mismatched inputs") {
  ParamSet ps(8);
  const auto att = TextVisualAttention::create(ps, "att", 5, 7, 4, 4);
  CHECK_THROWS_AS(att.attend(ps, Tensor::zeros({21}), Tensor::zeros({7})), ConfigError);
  CHECK_THROWS_AS(att.attend(ps, Tensor::zeros({20}), Tensor::zeros({6})), ConfigError);
  CHECK_THROWS_AS(TextVisualAttention::create(ps, "bad", 5, 7, 4, 0), ConfigError);
}
