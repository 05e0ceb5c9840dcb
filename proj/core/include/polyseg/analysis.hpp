#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "polyseg/corpus.hpp"
#include "polyseg/morfessor.hpp"

namespace polyseg {

struct RichnessRecord {
  std::size_t index = 0;
  double richness = 0;  // morphs per token
  double score = 0;
};

struct RichnessBin {
  std::size_t bin = 0;
  double lo = 0;
  double hi = 0;
  std::size_t count = 0;
  double mean_score = 0;  // NaN for empty bins
};

// Morphs per token under `probe`, sorted by richness (ties keep sentence order).
std::vector<RichnessRecord> richness_table(const MorfModel& probe,
                                           const std::vector<Sentence>& sentences,
                                           const std::vector<double>& scores);

// Equal-width bins over the observed richness range.
std::vector<RichnessBin> bin_richness(const std::vector<RichnessRecord>& records,
                                      std::size_t bins = 10);

struct UnkReport {
  std::string system;
  std::uint64_t total = 0;
  std::uint64_t unk = 0;
  double rate = 0;
};

// Counts produced pieces missing from `vocabulary`.
UnkReport unk_report(std::string system, const std::vector<Sentence>& segmented,
                     const std::set<std::string>& vocabulary);

std::set<std::string> read_vocabulary(std::istream& in);

void write_richness_csv(std::ostream& out, const std::vector<RichnessRecord>& records,
                        char sep = ',');
void write_bins_csv(std::ostream& out, const std::vector<RichnessBin>& bins, char sep = ',');
void write_unk_csv(std::ostream& out, const std::vector<UnkReport>& reports, char sep = ',');

}  // namespace polyseg
