#include "vidmem/numerics/params.hpp"

#include <cmath>
#include <random>

#include "vidmem/errors.hpp"

namespace vidmem {
namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Tensor& ParamSet::add(const std::string& name, Shape shape, std::size_t fan_in) {
  if (params_.count(name)) throw ParameterError("duplicate parameter name '" + name + "'");
  if (fan_in == 0) throw ParameterError("parameter '" + name + "' has zero fan-in");
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  std::mt19937_64 rng(mix_seed(seed_, fnv1a(name)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> values(shape_numel(shape));
  for (double& v : values) v = dist(rng);
  auto [it, inserted] = params_.emplace(name, Tensor(std::move(shape), std::move(values), true));
  return it->second;
}

Tensor& ParamSet::add_tensor(const std::string& name, const Tensor& value) {
  if (params_.count(name)) throw ParameterError("duplicate parameter name '" + name + "'");
  std::vector<double> values(value.data().begin(), value.data().end());
  auto [it, inserted] = params_.emplace(name, Tensor(value.shape(), std::move(values), true));
  return it->second;
}

const Tensor& ParamSet::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ParameterError("unknown parameter '" + name + "'");
  return it->second;
}

Tensor& ParamSet::get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ParameterError("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParamSet::num_scalars() const {
  std::size_t n = 0;
  for (const auto& [name, t] : params_) n += t.numel();
  return n;
}

void ParamSet::zero_grad() {
  for (auto& [name, t] : params_) t.zero_grad();
}

ParamSet::ParamSet(const ParamSet& other) : seed_(other.seed_) {
  for (const auto& [name, t] : other.params_) add_tensor(name, t);
}

ParamSet& ParamSet::operator=(const ParamSet& other) {
  if (this != &other) {
    ParamSet copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void backward(const Tensor& loss, ParamSet& params) {
  params.zero_grad();
  loss.backward();
  for (auto& [name, t] : params) t.node()->grad_buffer();
}

}  // namespace vidmem
