#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "polyseg/mt_metrics.hpp"

namespace polyseg {

struct SignifOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 1917;
  double alpha = 0.05;
  bool enumerate_small = true;
};

struct SignifResult {
  double score_a = 0;
  double score_b = 0;
  double delta = 0;  // score_a - score_b
  double p_value = 1;
  std::size_t trials = 0;
  bool exact = false;  // all 2^n swap patterns were enumerated
  bool significant = false;
};

// Paired approximate randomization: each trial swaps the two systems'
// outputs on every sentence independently with probability 1/2 and
// recomputes the corpus-level difference from summed sentence statistics.
// When 2^n does not exceed the trial budget every pattern is enumerated.
SignifResult paired_randomization_test(MtMetric metric, const std::vector<std::string>& sys_a,
                                       const std::vector<std::string>& sys_b,
                                       const std::vector<std::string>& refs,
                                       const SignifOptions& options = {});

}  // namespace polyseg
