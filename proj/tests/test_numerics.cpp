#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vidmem/errors.hpp"
#include "vidmem/numerics/grad_check.hpp"
#include "vidmem/numerics/layers.hpp"
#include "vidmem/numerics/ops.hpp"
#include "vidmem/numerics/optim.hpp"

using namespace vidmem;
using testing::numeric_grad;
using testing::random_tensor;
using testing::rel_error;

TEST_CASE("tensor construction validates shape and values") {
  CHECK_THROWS_AS(Tensor({2, 2}, {1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(Tensor({0, 2}, {}), DimensionError);
  CHECK_THROWS_AS(Tensor::vector({1.0, std::nan("")}), NumericError);
  CHECK_THROWS_AS(Tensor::vector({INFINITY}), NumericError);
  const Tensor m = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(m.at(1, 2) == 6);
  CHECK(m.numel() == 6);
}

TEST_CASE("graph results are read-only and backward needs a scalar") {
  const Tensor a = Tensor::vector({1, 2}, true);
  Tensor b = ops::scale(a, 2.0);
  CHECK_THROWS_AS(b.mutable_data(), ContractError);
  CHECK_THROWS_AS(b.backward(), ContractError);
}

TEST_CASE("linear examples") {
  const Tensor x = Tensor::vector({1, 2});
  const Tensor id = Tensor::matrix(2, 2, {1, 0, 0, 1});
  const Tensor y = ops::linear(x, id, Tensor::vector({0, 0}));
  CHECK(y[0] == 1);
  CHECK(y[1] == 2);
  const Tensor z = ops::linear(Tensor::vector({1, 1}), Tensor::matrix(2, 1, {2, 3}), Tensor::vector({-5}));
  CHECK(z.item() == 0.0);
  CHECK_THROWS_AS(ops::linear(Tensor::vector({1, 2, 3}), id), DimensionError);
}

TEST_CASE("linear gradient matches central differences within 1e-6") {
  std::mt19937_64 rng(1);
  ParamSet ps(2);
  ps.add_tensor("x", random_tensor(rng, {3, 4}));
  ps.add_tensor("w", random_tensor(rng, {4, 2}));
  ps.add_tensor("b", random_tensor(rng, {2}));
  const Tensor r = random_tensor(rng, {3, 2});
  auto f = [&] { return ops::sum(ops::mul(ops::linear(ps.get("x"), ps.get("w"), ps.get("b")), r)); };
  backward(f(), ps);
  for (const char* name : {"x", "w", "b"}) {
    const auto num = numeric_grad(ps, name, [&] { return f().item(); });
    CHECK(rel_error(ps.get(name).grad(), num) < 1e-6);
  }
}

TEST_CASE("every differentiable op matches central differences") {
  std::mt19937_64 rng(3);
  struct Case {
    const char* name;
    std::function<Tensor(const Tensor&, const Tensor&)> op;
    Shape a, b;
    bool positive_a = false;
  };
  const std::vector<Case> cases = {
      {"add", [](auto& a, auto& b) { return ops::add(a, b); }, {3, 4}, {3, 4}},
      {"sub", [](auto& a, auto& b) { return ops::sub(a, b); }, {5}, {5}},
      {"mul", [](auto& a, auto& b) { return ops::mul(a, b); }, {2, 6}, {2, 6}},
      {"scale", [](auto& a, auto&) { return ops::scale(a, -1.7); }, {4}, {1}},
      {"add_scalar", [](auto& a, auto&) { return ops::add_scalar(a, 0.3); }, {4}, {1}},
      {"square", [](auto& a, auto&) { return ops::square(a); }, {3, 3}, {1}},
      {"add_bias", [](auto& a, auto& b) { return ops::add_bias(a, b); }, {4, 3}, {3}},
      {"matmul_mm", [](auto& a, auto& b) { return ops::matmul(a, b); }, {3, 5}, {5, 2}},
      {"matmul_mv", [](auto& a, auto& b) { return ops::matmul(a, b); }, {3, 5}, {5}},
      {"matmul_vm", [](auto& a, auto& b) { return ops::matmul(a, b); }, {5}, {5, 2}},
      {"tanh", [](auto& a, auto&) { return ops::tanh(a); }, {8, 4}, {1}},
      {"sigmoid", [](auto& a, auto&) { return ops::sigmoid(a); }, {8, 4}, {1}},
      {"softmax", [](auto& a, auto&) { return ops::softmax(a); }, {3, 5}, {1}},
      {"exp", [](auto& a, auto&) { return ops::exp(a); }, {6}, {1}},
      {"log", [](auto& a, auto&) { return ops::log(a); }, {6}, {1}, true},
      {"softplus", [](auto& a, auto&) { return ops::softplus(a); }, {6}, {1}},
      {"sum", [](auto& a, auto&) { return ops::sum(a); }, {2, 3}, {1}},
      {"mean", [](auto& a, auto&) { return ops::mean(a); }, {2, 3}, {1}},
      {"dot", [](auto& a, auto& b) { return ops::dot(a, b); }, {7}, {7}},
      {"logsumexp", [](auto& a, auto&) { return ops::logsumexp(a); }, {9}, {1}},
      {"mean_pool", [](auto& a, auto&) { return ops::mean_pool(a); }, {5, 3}, {1}},
      {"concat", [](auto& a, auto& b) { return ops::concat({a, b, a}); }, {3}, {2}},
      {"concat_cols", [](auto& a, auto& b) { return ops::concat_cols({a, b}); }, {4, 2}, {4, 3}},
      {"stack_rows", [](auto& a, auto& b) { return ops::stack_rows({a, b}); }, {3}, {3}},
      {"slice", [](auto& a, auto&) { return ops::slice(a, 2, 5); }, {7}, {1}},
      {"row", [](auto& a, auto&) { return ops::row(a, 1); }, {3, 4}, {1}},
      {"reverse_rows", [](auto& a, auto&) { return ops::reverse_rows(a); }, {4, 3}, {1}},
      {"reshape", [](auto& a, auto&) { return ops::reshape(a, {6, 2}); }, {3, 4}, {1}},
      {"l2_normalize", [](auto& a, auto&) { return ops::l2_normalize(a); }, {6}, {1}},
      {"conv1d", [](auto& a, auto& b) { return ops::conv1d(a, ops::reshape(b, {9, 2}), Tensor::zeros({2}), 3); }, {6, 3},
       {18}},
  };
  for (const auto& c : cases) {
    ParamSet ps(1);
    Tensor a = random_tensor(rng, c.a);
    if (c.positive_a) {
      std::vector<double> v(a.data().begin(), a.data().end());
      for (double& x : v) x = std::abs(x) + 0.5;
      a = Tensor(c.a, v);
    }
    ps.add_tensor("a", a);
    ps.add_tensor("b", random_tensor(rng, c.b));
    const Tensor probe_shape = c.op(ps.get("a"), ps.get("b"));
    const Tensor r = random_tensor(rng, probe_shape.shape());
    auto f = [&] { return ops::sum(ops::mul(c.op(ps.get("a"), ps.get("b")), r)); };
    backward(f(), ps);
    for (const char* name : {"a", "b"}) {
      const auto num = numeric_grad(ps, name, [&] { return f().item(); });
      INFO(c.name << " wrt " << name);
      CHECK(rel_error(ps.get(name).grad(), num) < 1e-6);
    }
  }
}

TEST_CASE("conv1d keeps the time length and handles the trivial cases") {
  ParamSet ps(4);
  const Conv1d conv = Conv1d::create(ps, "c", 3, 2, 4);
  std::fill(ps.get("c.bias").mutable_data().begin(), ps.get("c.bias").mutable_data().end(), 0.0);
  const Tensor zeros = conv.forward(ps, Tensor::zeros({5, 3}));
  CHECK(zeros.shape() == Shape{5, 2});
  for (double v : zeros.data()) CHECK(v == 0.0);

  std::mt19937_64 rng(2);
  ParamSet ps2(5);
  const Conv1d c3 = Conv1d::create(ps2, "c", 4, 2, 3);
  CHECK(c3.forward(ps2, random_tensor(rng, {8, 4})).shape() == Shape{8, 2});
  for (std::size_t k = 1; k <= 6; ++k) {
    ParamSet p(k);
    const Conv1d ck = Conv1d::create(p, "c", 2, 3, k);
    for (std::size_t t : {1, 2, 5}) CHECK(ck.forward(p, random_tensor(rng, {t, 2})).dim(0) == t);
  }

  // k = 1 with an identity kernel reproduces the input
  ParamSet pid(6);
  const Conv1d c1 = Conv1d::create(pid, "c", 3, 3, 1);
  auto w = pid.get("c.weight").mutable_data();
  std::fill(w.begin(), w.end(), 0.0);
  for (std::size_t d = 0; d < 3; ++d) w[d * 3 + d] = 1.0;
  std::fill(pid.get("c.bias").mutable_data().begin(), pid.get("c.bias").mutable_data().end(), 0.0);
  const Tensor x = random_tensor(rng, {5, 3});
  const Tensor y = c1.forward(pid, x);
  for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y[i] == x[i]);

  CHECK_THROWS_AS(ops::conv1d(x, Tensor::zeros({3, 3}), Tensor(), 0), ParameterError);
}

TEST_CASE("conv1d matches a direct padded convolution") {
  std::mt19937_64 rng(8);
  for (std::size_t k = 2; k <= 5; ++k) {
    const std::size_t t_len = 6, d = 3, out = 2;
    const Tensor x = random_tensor(rng, {t_len, d});
    const Tensor w = random_tensor(rng, {k * d, out});
    const Tensor b = random_tensor(rng, {out});
    const Tensor y = ops::conv1d(x, w, b, k);
    const long left = static_cast<long>((k - 1) / 2);
    for (std::size_t t = 0; t < t_len; ++t) {
      for (std::size_t o = 0; o < out; ++o) {
        double expect = b[o];
        for (std::size_t tap = 0; tap < k; ++tap) {
          const long src = static_cast<long>(t) + static_cast<long>(tap) - left;
          if (src < 0 || src >= static_cast<long>(t_len)) continue;
          for (std::size_t c = 0; c < d; ++c) expect += x.at(src, c) * w.at(tap * d + c, o);
        }
        CHECK(std::abs(y.at(t, o) - expect) < 1e-12);
      }
    }
  }
}

TEST_CASE("bigru shapes") {
  std::mt19937_64 rng(9);
  ParamSet ps(1);
  const BiGru g = BiGru::create(ps, "g", 16, 32);
  CHECK(g.forward(ps, random_tensor(rng, {8, 16})).shape() == Shape{8, 64});
  CHECK(g.forward(ps, random_tensor(rng, {1, 16})).shape() == Shape{1, 64});
  ParamSet bad(1);
  CHECK_THROWS_AS(BiGru::create(bad, "g", 4, 0), ParameterError);
}

TEST_CASE("gru follows the reset-before recurrence") {
  std::mt19937_64 rng(10);
  ParamSet ps(2);
  const std::size_t in = 3, h = 2;
  const Gru g = Gru::create(ps, "g", in, h);
  const Tensor x = random_tensor(rng, {4, in});
  const Tensor out = g.forward(ps, x);
  const auto w_ih = ps.get("g.w_ih"), b_ih = ps.get("g.b_ih"), w_hrz = ps.get("g.w_hrz"), b_hrz = ps.get("g.b_hrz"),
             w_hn = ps.get("g.w_hn"), b_hn = ps.get("g.b_hn");
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  std::vector<double> state(h, 0.0);
  for (std::size_t t = 0; t < 4; ++t) {
    std::vector<double> gx(3 * h), gh(2 * h), next(h);
    for (std::size_t j = 0; j < 3 * h; ++j) {
      gx[j] = b_ih[j];
      for (std::size_t i = 0; i < in; ++i) gx[j] += x.at(t, i) * w_ih.at(i, j);
    }
    for (std::size_t j = 0; j < 2 * h; ++j) {
      gh[j] = b_hrz[j];
      for (std::size_t i = 0; i < h; ++i) gh[j] += state[i] * w_hrz.at(i, j);
    }
    std::vector<double> r(h), z(h), rh(h);
    for (std::size_t j = 0; j < h; ++j) {
      r[j] = sig(gx[j] + gh[j]);
      z[j] = sig(gx[h + j] + gh[h + j]);
      rh[j] = r[j] * state[j];
    }
    for (std::size_t j = 0; j < h; ++j) {
      double a = b_hn[j];
      for (std::size_t i = 0; i < h; ++i) a += rh[i] * w_hn.at(i, j);
      const double n = std::tanh(gx[2 * h + j] + a);
      next[j] = (1 - z[j]) * n + z[j] * state[j];
    }
    state = next;
    for (std::size_t j = 0; j < h; ++j) CHECK(std::abs(out.at(t, j) - state[j]) < 1e-12);
  }
}

TEST_CASE("bigru symmetry: reversed input with swapped directions mirrors the output") {
  std::mt19937_64 rng(12);
  ParamSet a(7);
  const BiGru g = BiGru::create(a, "g", 5, 4);
  ParamSet b(0);
  for (const auto& [name, t] : a) {
    std::string swapped = name;
    if (name.rfind("g.fwd.", 0) == 0) swapped.replace(0, 6, "g.bwd.");
    else swapped.replace(0, 6, "g.fwd.");
    b.add_tensor(swapped, t);
  }
  const Tensor x = random_tensor(rng, {6, 5});
  const Tensor ya = g.forward(a, x);
  const Tensor yb = g.forward(b, ops::reverse_rows(x));
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(std::abs(yb.at(t, j) - ya.at(5 - t, 4 + j)) < 1e-12);
      CHECK(std::abs(yb.at(t, 4 + j) - ya.at(5 - t, j)) < 1e-12);
    }
  }
}

TEST_CASE("activations") {
  const Tensor s = ops::softmax(Tensor::vector({0, 0, 0}));
  for (double v : s.data()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const Tensor r = ops::relu(Tensor::vector({-1, 2}));
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 2.0);
  CHECK_THROWS_AS(ops::parse_activation("gelu"), ParameterError);
  CHECK(ops::parse_activation("tanh") == ops::Activation::Tanh);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = testing::uniform(rng, 7, -20, 20);
    const double c = testing::uniform(rng, 1, -50, 50)[0];
    std::vector<double> shifted = x;
    for (double& v : shifted) v += c;
    const Tensor p = ops::softmax(Tensor::vector(x));
    const Tensor q = ops::softmax(Tensor::vector(shifted));
    double total = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(std::abs(p[i] - q[i]) < 1e-12);
      CHECK(p[i] >= 0.0);
      CHECK(p[i] <= 1.0);
      total += p[i];
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    const Tensor sg = ops::sigmoid(Tensor::vector(x));
    for (double v : sg.data()) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
  CHECK_THROWS_AS(ops::log(Tensor::vector({1.0, 0.0})), DomainError);
}

TEST_CASE("mean_pool examples") {
  const Tensor m = ops::mean_pool(Tensor::matrix(2, 2, {1, 2, 3, 4}));
  CHECK(m[0] == 2.0);
  CHECK(m[1] == 3.0);
  const Tensor one = ops::mean_pool(Tensor::matrix(1, 3, {4, 5, 6}));
  CHECK(one[2] == 6.0);
  const Tensor c = ops::mean_pool(Tensor::matrix(3, 2, {0.3, -1, 0.3, -1, 0.3, -1}));
  CHECK(std::abs(c[0] - 0.3) < 1e-15);
}

TEST_CASE("backward populates reachable parameters and zeros the rest") {
  ParamSet ps(1);
  ps.add_tensor("w", Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}));
  ps.add_tensor("unused", Tensor::vector({1, 2}));
  const Tensor x = Tensor::vector({0.5, -2});
  backward(ops::sum(ops::matmul(x, ps.get("w"))), ps);
  const auto g = ps.get("w").grad();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(g[i * 3 + j] == x[i]);
  for (double v : ps.get("unused").grad()) CHECK(v == 0.0);
}

TEST_CASE("composite encoder gradient matches central differences") {
  std::mt19937_64 rng(14);
  ParamSet ps(3);
  const BiGru g = BiGru::create(ps, "g", 4, 3);
  const Conv1d c = Conv1d::create(ps, "c", 6, 2, 3);
  const Linear l = Linear::create(ps, "l", 2, 1);
  const Tensor x = random_tensor(rng, {5, 4});
  auto f = [&] { return ops::sum(ops::sigmoid(l.forward(ps, ops::mean_pool(ops::relu(c.forward(ps, g.forward(ps, x))))))); };
  backward(f(), ps);
  for (const auto& [name, t] : ps) {
    const auto analytic = t.grad();
    const auto num = numeric_grad(ps, name, [&] { return f().item(); });
    INFO(name);
    CHECK(rel_error(analytic, num) < 1e-4);
  }
}

TEST_CASE("grad_check contract") {
  std::mt19937_64 rng(15);
  {
    ParamSet ps(1);
    const Linear l = Linear::create(ps, "l", 4, 3);
    const Tensor x = random_tensor(rng, {2, 4});
    const auto r = grad_check("linear", ps, [&] { return ops::sum(ops::square(l.forward(ps, x))); });
    CHECK(r.max_rel_error < 1e-6);
    CHECK(r.per_parameter.size() == 2);
  }
  {
    ParamSet ps(2);
    const BiGru g = BiGru::create(ps, "g", 3, 4);
    const Tensor x = random_tensor(rng, {1, 3});
    CHECK(grad_check("bigru", ps, [&] { return ops::sum(g.forward(ps, x)); }).max_rel_error < 1e-4);
  }
  {
    ParamSet ps(3);
    ps.add_tensor("p", Tensor::vector({1, 2}));
    const auto r = grad_check("constant", ps, [] { return Tensor::scalar(4.0); });
    CHECK(r.max_rel_error == 0.0);
    CHECK_THROWS_AS(grad_check("x", ps, [] { return Tensor::scalar(1.0); }, 1e-2), ParameterError);
    CHECK_THROWS_AS(grad_check("x", ps, [] { return Tensor::scalar(1.0); }, 1e-9), ParameterError);
  }
  {
    // exp(710) overflows only on the upward perturbation
    ParamSet ps(4);
    ps.add_tensor("edge", Tensor::vector({709.7822}));
    try {
      grad_check("overflow", ps, [&] { return ops::sum(ops::exp(ps.get("edge"))); }, 1e-3);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("edge") != std::string::npos);
    }
  }
}

TEST_CASE("dropout is the identity at inference and unbiased in training") {
  std::mt19937_64 rng(16);
  const Tensor x = Tensor::vector(std::vector<double>(10000, 1.0));
  const Tensor same = ops::dropout(x, 0.5, false, nullptr);
  CHECK(same.same_node(x));
  const Tensor y = ops::dropout(x, 0.5, true, &rng);
  double total = 0.0;
  for (double v : y.data()) {
    CHECK((v == 0.0 || v == 2.0));
    total += v;
  }
  CHECK(std::abs(total / 10000.0 - 1.0) < 0.05);
  CHECK_THROWS_AS(ops::dropout(x, 1.0, true, &rng), ParameterError);
}

TEST_CASE("parameter initialization is seeded, bounded and name-stable") {
  ParamSet a(42), b(42), c(43);
  a.add("w", {10, 5}, 10);
  b.add("other", {3}, 3);
  b.add("w", {10, 5}, 10);
  c.add("w", {10, 5}, 10);
  const double bound = std::sqrt(1.0 / 10.0);
  bool differs = false;
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(a.get("w")[i] == b.get("w")[i]);
    CHECK(std::abs(a.get("w")[i]) <= bound);
    differs = differs || a.get("w")[i] != c.get("w")[i];
  }
  CHECK(differs);
  CHECK_THROWS_AS(a.add("w", {1}, 1), ParameterError);

  ParamSet copy = a;
  copy.get("w").mutable_data()[0] += 1.0;
  CHECK(copy.get("w")[0] != a.get("w")[0]);
}

TEST_CASE("adam minimizes a quadratic and step_lr decays on schedule") {
  ParamSet ps(1);
  ps.add_tensor("x", Tensor::vector({3.0, -2.0}));
  Adam adam(Adam::Options{0.1, 0.9, 0.999, 1e-8, 0.0});
  for (int i = 0; i < 500; ++i) {
    backward(ops::sum(ops::square(ps.get("x"))), ps);
    adam.step(ps);
  }
  CHECK(std::abs(ps.get("x")[0]) < 1e-2);
  CHECK(std::abs(ps.get("x")[1]) < 1e-2);
  CHECK(step_lr(1e-3, 0, 60, 0.1) == 1e-3);
  CHECK(step_lr(1e-3, 59, 60, 0.1) == 1e-3);
  CHECK(std::abs(step_lr(1e-3, 60, 60, 0.1) - 1e-4) < 1e-18);
  CHECK(std::abs(step_lr(1e-3, 125, 60, 0.1) - 1e-5) < 1e-19);
}

TEST_CASE("no-grad mode builds no graph") {
  const Tensor a = Tensor::vector({1, 2}, true);
  {
    NoGradGuard guard;
    CHECK_FALSE(ops::scale(a, 2).requires_grad());
  }
  CHECK(ops::scale(a, 2).requires_grad());
  CHECK_FALSE(a.detach().requires_grad());
}
