#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "polyseg/corpus.hpp"

namespace polyseg {

struct SegScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double accuracy = 0;  // words whose morph sequence matches exactly
};

double f1_score(double precision, double recall);

// Micro-averaged over internal boundary positions. With no predicted
// boundaries precision is 1; with no gold boundaries recall is 1.
SegScore boundary_f1(const SegmentationDataset& pred, const SegmentationDataset& gold);

// One-to-one matching between predicted and gold morph types, weighted by
// per-word co-occurrence counts.
SegScore emma_f1(const SegmentationDataset& pred, const SegmentationDataset& gold);

struct Matching {
  std::uint64_t weight = 0;
  std::vector<std::size_t> row_to_col;  // SIZE_MAX when unmatched
};

// Maximum-weight bipartite matching over a dense rows x cols weight table.
Matching max_weight_matching(const std::vector<std::vector<std::uint64_t>>& weights);

}  // namespace polyseg
