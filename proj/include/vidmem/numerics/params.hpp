#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "vidmem/numerics/tensor.hpp"

namespace vidmem {

// Named trainable tensors. Iteration order is lexicographic by name, which
// keeps optimizer updates and serialization deterministic.
class ParamSet {
 public:
  explicit ParamSet(std::uint64_t seed = 0) : seed_(seed) {}

  // Copies are deep: fresh leaves with the same values and no gradients.
  ParamSet(const ParamSet& other);
  ParamSet& operator=(const ParamSet& other);
  ParamSet(ParamSet&&) noexcept = default;
  ParamSet& operator=(ParamSet&&) noexcept = default;

  // Registers a grad-tracked parameter initialized uniformly in
  // +-sqrt(1/fan_in). The stream for each parameter is derived from the set
  // seed and the parameter name, so adding parameters never perturbs the
  // initial values of existing ones.
  Tensor& add(const std::string& name, Shape shape, std::size_t fan_in);
  // Registers an existing tensor (copied into a fresh grad-tracked leaf).
  Tensor& add_tensor(const std::string& name, const Tensor& value);

  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);

  std::size_t size() const { return params_.size(); }
  std::size_t num_scalars() const;
  std::uint64_t seed() const { return seed_; }

  void zero_grad();

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::uint64_t seed_;
  std::map<std::string, Tensor> params_;
};

// Runs loss.backward() after clearing every parameter gradient, then makes
// sure each parameter holds a gradient buffer (zero when unreachable).
void backward(const Tensor& loss, ParamSet& params);

// 64-bit mixing function used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace vidmem
