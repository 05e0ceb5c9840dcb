#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "polyseg/corpus.hpp"

namespace polyseg {

enum class MorfVariant { baseline, lmvr, flatcat };

// How a word type contributes to morph counts during training: once per
// type, or once per running-text token.
enum class CountWeighting { types, tokens };

std::string_view to_string(MorfVariant v);
MorfVariant parse_morf_variant(std::string_view name);

enum class Category : std::uint8_t { pre = 0, stm = 1, suf = 2, non = 3 };
inline constexpr std::size_t kCategories = 4;
std::string_view to_string(Category c);

// Category HMM over morphs. Transition row 0 is the word-start state; row
// 1 + c is category c. Forbidden transitions hold -inf.
struct CategoryModel {
  std::array<std::array<double, kCategories>, kCategories + 1> log_transitions{};
  std::map<std::string, std::array<double, kCategories>, std::less<>> log_emissions;
};

struct MorfModel {
  MorfVariant variant = MorfVariant::baseline;
  CountWeighting weighting = CountWeighting::types;
  double alpha = 1.0;
  std::optional<std::size_t> max_lexicon_size;
  std::set<std::string> alphabet;
  std::map<std::string, std::uint64_t, std::less<>> lexicon;
  std::uint64_t total_tokens = 0;
  // Analyses of the training word types; kept in memory only.
  std::map<std::string, std::vector<std::string>, std::less<>> analyses;
  std::optional<CategoryModel> categories;
};

struct MdlCost {
  double corpus_cost = 0;   // nats
  double lexicon_cost = 0;  // nats
  double total = 0;         // corpus_cost + alpha * lexicon_cost
};

// Corpus code: -sum_m c(m) log(c(m)/T). Lexicon code: each morph spelled
// with a uniform code over the alphabet plus an end-of-morph symbol.
MdlCost mdl_cost(const MorfModel& model);

// Number of lexicon entries the size cap is charged for: the alphabet
// (always codable) plus every multi-character morph type.
std::size_t lexicon_measure(const MorfModel& model);

// Throws DataError if counts, totals or the cap are inconsistent.
void check_consistent(const MorfModel& model);

struct MorfessorOptions {
  double alpha = 1.0;
  std::uint64_t seed = 1917;
  double epsilon = 0.1;  // stop once an epoch gains less than this (nats)
  std::size_t max_epochs = 100;
};

struct LmvrOptions : MorfessorOptions {
  std::optional<std::size_t> max_lexicon_size;
  CountWeighting weighting = CountWeighting::tokens;
};

struct TrainingTrace {
  std::vector<double> epoch_costs;  // entry 0 is the initial state
  std::uint64_t accepted_states = 0;
  std::size_t max_lexicon_measure = 0;
};

MorfModel train_baseline(const WordCounts& word_counts,
                         const MorfessorOptions& options = {},
                         TrainingTrace* trace = nullptr);

MorfModel train_lmvr(const WordCounts& word_counts, const LmvrOptions& options = {},
                     TrainingTrace* trace = nullptr);

// -log p(m) for lexicon morphs; unseen morphs pay the cost of adding them
// to the lexicon plus a one-token smoothed corpus cost.
double morph_cost(const MorfModel& model, std::string_view morph);
double unseen_morph_cost(const MorfModel& model, std::string_view morph);
double segmentation_cost(const MorfModel& model, const std::vector<std::string>& morphs);

// Minimum-cost segmentation by dynamic programming over split points.
std::vector<std::string> viterbi_segment(const MorfModel& model, std::string_view word);

// Variant-aware segmentation: category Viterbi for FlatCat models, plain
// Viterbi otherwise.
std::vector<std::string> segment(const MorfModel& model, std::string_view word);

std::vector<std::vector<SegmentedWord>> segment_corpus(const MorfModel& model,
                                                       const std::vector<Sentence>& sentences);

}  // namespace polyseg
