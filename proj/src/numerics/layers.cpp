#include "vidmem/numerics/layers.hpp"

#include "vidmem/errors.hpp"

namespace vidmem {

Linear Linear::create(ParamSet& params, const std::string& name, std::size_t in, std::size_t out,
                      bool bias) {
  if (in == 0 || out == 0) throw ParameterError("linear '" + name + "': dimensions must be positive");
  params.add(name + ".weight", {in, out}, in);
  if (bias) params.add(name + ".bias", {out}, in);
  return Linear{name, in, out, bias};
}

Tensor Linear::forward(const ParamSet& params, const Tensor& x) const {
  const Tensor& w = params.get(name + ".weight");
  if (!has_bias) return ops::linear(x, w);
  return ops::linear(x, w, params.get(name + ".bias"));
}

Conv1d Conv1d::create(ParamSet& params, const std::string& name, std::size_t in, std::size_t out,
                      std::size_t kernel_size) {
  if (kernel_size == 0) throw ParameterError("conv1d '" + name + "': kernel_size must be >= 1");
  if (in == 0 || out == 0) throw ParameterError("conv1d '" + name + "': channels must be positive");
  params.add(name + ".weight", {kernel_size * in, out}, kernel_size * in);
  params.add(name + ".bias", {out}, kernel_size * in);
  return Conv1d{name, in, out, kernel_size};
}

Tensor Conv1d::forward(const ParamSet& params, const Tensor& x) const {
  return ops::conv1d(x, params.get(name + ".weight"), params.get(name + ".bias"), kernel_size);
}

Gru Gru::create(ParamSet& params, const std::string& name, std::size_t in, std::size_t hidden) {
  if (hidden == 0) throw ParameterError("gru '" + name + "': hidden must be >= 1");
  if (in == 0) throw ParameterError("gru '" + name + "': input width must be >= 1");
  // PyTorch-style init: every tensor uniform in +-1/sqrt(hidden).
  params.add(name + ".w_ih", {in, 3 * hidden}, hidden);
  params.add(name + ".b_ih", {3 * hidden}, hidden);
  params.add(name + ".w_hrz", {hidden, 2 * hidden}, hidden);
  params.add(name + ".b_hrz", {2 * hidden}, hidden);
  params.add(name + ".w_hn", {hidden, hidden}, hidden);
  params.add(name + ".b_hn", {hidden}, hidden);
  return Gru{name, in, hidden};
}

Tensor Gru::forward(const ParamSet& params, const Tensor& x) const {
  if (x.rank() != 2 || x.dim(1) != in) {
    throw DimensionError("gru '" + name + "': expected input (T," + std::to_string(in) + "), got " +
                         shape_str(x.shape()));
  }
  const std::size_t h = hidden;
  const Tensor gates_x = ops::linear(x, params.get(name + ".w_ih"), params.get(name + ".b_ih"));
  const Tensor& w_hrz = params.get(name + ".w_hrz");
  const Tensor& b_hrz = params.get(name + ".b_hrz");
  const Tensor& w_hn = params.get(name + ".w_hn");
  const Tensor& b_hn = params.get(name + ".b_hn");

  Tensor state = Tensor::zeros({h});
  std::vector<Tensor> states;
  states.reserve(x.dim(0));
  for (std::size_t t = 0; t < x.dim(0); ++t) {
    const Tensor gx = ops::row(gates_x, t);
    const Tensor rz = ops::sigmoid(
        ops::add(ops::slice(gx, 0, 2 * h), ops::add_bias(ops::matmul(state, w_hrz), b_hrz)));
    const Tensor r = ops::slice(rz, 0, h);
    const Tensor z = ops::slice(rz, h, 2 * h);
    const Tensor cand = ops::tanh(
        ops::add(ops::slice(gx, 2 * h, 3 * h), ops::add_bias(ops::matmul(ops::mul(r, state), w_hn), b_hn)));
    // h' = n + z * (h - n)
    state = ops::add(cand, ops::mul(z, ops::sub(state, cand)));
    states.push_back(state);
  }
  return ops::stack_rows(states);
}

BiGru BiGru::create(ParamSet& params, const std::string& name, std::size_t in, std::size_t hidden) {
  return BiGru{Gru::create(params, name + ".fwd", in, hidden), Gru::create(params, name + ".bwd", in, hidden)};
}

Tensor BiGru::forward(const ParamSet& params, const Tensor& x) const {
  const Tensor fwd = forward_dir.forward(params, x);
  const Tensor bwd = ops::reverse_rows(backward_dir.forward(params, ops::reverse_rows(x)));
  return ops::concat_cols({fwd, bwd});
}

}  // namespace vidmem
