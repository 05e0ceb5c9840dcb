#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "polyseg/morfessor.hpp"

namespace polyseg {

struct FlatcatOptions {
  double diversity_threshold = 3.0;  // distinct neighbours for affix-like morphs
  double length_threshold = 3.0;     // characters for stem-like morphs
  double slope = 1.0;
  std::size_t max_iterations = 20;
  double epsilon = 0.0;  // stop early once an iteration gains less; 0 runs all
  // Only STM is reachable; useful for checking the lattice against plain Viterbi.
  bool stem_only = false;
};

struct FlatcatTrace {
  std::vector<double> log_likelihoods;  // entry 0 is the initial parameters
};

struct TaggedMorph {
  std::string morph;
  Category category;
};

// Grammar over categories. `from_row` is 0 for word start, 1 + c otherwise.
bool transition_allowed(std::size_t from_row, Category to, bool stem_only = false);
bool final_allowed(Category c);

// Per-morph P(category | morph) before EM, from context diversity and length.
std::array<double, kCategories> initial_affinity(std::size_t left_diversity,
                                                 std::size_t right_diversity,
                                                 std::size_t length,
                                                 const FlatcatOptions& options);

// Refines a trained baseline model with a category HMM fitted by EM on the
// baseline's analyses, then re-analyses the training words. `word_counts`
// must be the corpus the baseline was trained on.
MorfModel train_flatcat(const WordCounts& word_counts, const MorfModel& baseline, const FlatcatOptions& options = {},
                        FlatcatTrace* trace = nullptr);

// log p(morph sequence) summed over category paths.
double sequence_log_likelihood(const MorfModel& model, const std::vector<std::string>& morphs);

// Posterior category marginals per position.
std::vector<std::array<double, kCategories>> category_posteriors(
    const MorfModel& model, const std::vector<std::string>& morphs);

// log p(morph | category); unseen morphs get the add-to-lexicon penalty.
double log_emission(const MorfModel& model, std::string_view morph, Category c);

// Best joint (split, category) analysis of a word.
std::vector<TaggedMorph> flatcat_viterbi(const MorfModel& model, std::string_view word);

}  // namespace polyseg
