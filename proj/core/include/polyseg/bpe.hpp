#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polyseg/corpus.hpp"

namespace polyseg {

struct BpePiece {
  std::string text;
  bool unknown = false;  // built from a character never seen in training

  friend bool operator==(const BpePiece&, const BpePiece&) = default;
};

using BpeMerge = std::pair<std::string, std::string>;

// Ordered merge table plus the initial symbol inventory. The end-of-word
// marker is glued to the last character symbol of every word, so "ab"
// starts out as [a, b</w>].
class BpeModel {
 public:
  static constexpr std::string_view default_marker = "</w>";

  BpeModel() = default;

  // Rebuilds the vocabulary by replaying `merges` over `initial_symbols`.
  BpeModel(std::size_t target_vocab_size, std::string marker,
           std::set<std::string> initial_symbols, std::vector<BpeMerge> merges);

  std::size_t target_vocab_size() const noexcept { return target_vocab_size_; }
  const std::string& marker() const noexcept { return marker_; }
  const std::vector<BpeMerge>& merges() const noexcept { return merges_; }
  const std::set<std::string>& initial_symbols() const noexcept { return initial_symbols_; }
  const std::set<std::string>& vocab() const noexcept { return vocab_; }
  const std::set<std::string>& characters() const noexcept { return characters_; }

  std::vector<BpePiece> encode(std::string_view word) const;

 private:
  std::size_t target_vocab_size_ = 0;
  std::string marker_{default_marker};
  std::set<std::string> initial_symbols_;
  std::set<std::string> characters_;
  std::vector<BpeMerge> merges_;
  std::set<std::string> vocab_;
  std::map<BpeMerge, std::size_t> ranks_;
};

// Greedy most-frequent-pair merging. Pair counts are weighted by word
// frequency; ties go to the lexicographically smallest (left, right).
// Stops once the vocabulary reaches `target_vocab_size` or no pair occurs
// at least twice.
BpeModel train_bpe(const WordCounts& word_counts, std::size_t target_vocab_size,
                   std::string_view marker = BpeModel::default_marker);

// Initial symbol sequence for a word: characters, marker on the last one.
std::vector<std::string> bpe_initial_symbols(std::string_view word,
                                             std::string_view marker);

std::string bpe_decode(std::span<const std::string> pieces,
                       std::string_view marker = BpeModel::default_marker);

}  // namespace polyseg
