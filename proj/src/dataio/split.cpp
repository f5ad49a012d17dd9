#include "vidmem/dataio/split.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "vidmem/errors.hpp"
#include "vidmem/numerics/params.hpp"

namespace vidmem::dataio {

DatasetSplit split(const std::vector<FeatureRecord>& dataset, SplitFractions f, std::uint64_t seed) {
  if (f.train < 0 || f.val < 0 || f.test < 0) throw ParameterError("split: fractions must be non-negative");
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9) throw ParameterError("split: fractions must sum to 1");

  const std::size_t n = dataset.size();
  const auto share = [n](double frac) { return static_cast<std::size_t>(std::llround(frac * static_cast<double>(n))); };
  std::size_t n_val = share(f.val);
  std::size_t n_test = share(f.test);
  if (n_val + n_test > n) n_test = n - n_val;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(mix_seed(seed, 0x5B117ULL));
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }

  DatasetSplit out;
  for (std::size_t i = 0; i < n; ++i) {
    const FeatureRecord& rec = dataset[order[i]];
    if (i < n_val) {
      out.val.push_back(rec);
    } else if (i < n_val + n_test) {
      out.test.push_back(rec);
    } else {
      out.train.push_back(rec);
    }
  }
  return out;
}

}  // namespace vidmem::dataio
