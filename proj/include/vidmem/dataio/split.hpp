#pragma once

#include <cstdint>
#include <vector>

#include "vidmem/dataio/records.hpp"

namespace vidmem::dataio {

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<FeatureRecord> train;
  std::vector<FeatureRecord> val;
  std::vector<FeatureRecord> test;
};

// Seeded permutation cut into three parts. val and test receive
// round(N * fraction) records, train takes the remainder. Throws
// ParameterError when fractions are negative or do not sum to 1 (1e-9).
DatasetSplit split(const std::vector<FeatureRecord>& dataset, SplitFractions fractions, std::uint64_t seed);

}  // namespace vidmem::dataio
