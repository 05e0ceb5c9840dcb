#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polyseg/corpus.hpp"

namespace polyseg {

// Declaration order is the tie-break order for decoding.
enum class Tag : std::uint8_t { B = 0, E = 1, M = 2, S = 3 };
inline constexpr std::size_t kTags = 4;
inline constexpr std::size_t kAllowedTransitions = 8;

char tag_char(Tag t);
Tag parse_tag(char c);

bool tag_transition_allowed(Tag from, Tag to);
bool tag_start_allowed(Tag t);
bool tag_end_allowed(Tag t);
bool is_well_formed(std::span<const Tag> labels);

struct BmesSequence {
  std::vector<std::string> chars;
  std::vector<Tag> labels;
};

// Surface segmentations only; canonical entries raise UnsupportedModeError.
BmesSequence to_bmes(const SegmentedWord& word);
std::vector<std::string> from_bmes(const BmesSequence& seq);

// Padding symbols outside the word.
inline constexpr std::string_view kLeftPad = "\xEE\x80\x80";   // U+E000
inline constexpr std::string_view kRightPad = "\xEE\x80\x81";  // U+E001

// Every substring of length 1..delta inside the window [i-delta, i+delta],
// keyed as "<offset>:<text>" with offsets relative to i.
std::vector<std::string> extract_features(std::span<const std::string> chars, std::size_t i,
                                          std::size_t delta);

class CrfModel {
 public:
  CrfModel(std::size_t delta = 3, double l2 = 0.01);

  std::size_t delta() const noexcept { return delta_; }
  double l2() const noexcept { return l2_; }

  std::size_t num_features() const noexcept { return names_.size(); }
  const std::string& feature_name(std::size_t f) const { return names_[f]; }
  // Index of the feature, adding it with zero weights if new.
  std::size_t intern(const std::string& feature);
  // Index or SIZE_MAX when absent.
  std::size_t find(std::string_view feature) const;

  double weight(std::size_t feature, Tag t) const;
  void set_weight(std::size_t feature, Tag t, double w);
  // -inf for forbidden pairs.
  double transition(Tag from, Tag to) const;
  void set_transition(Tag from, Tag to, double w);

  // Flat layout: feature-major emission weights, then the allowed
  // transitions in (from, to) order.
  std::size_t num_parameters() const noexcept { return names_.size() * kTags + kAllowedTransitions; }
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);

  // Feature indices per position; unknown features are dropped.
  std::vector<std::vector<std::size_t>> featurize(std::span<const std::string> chars) const;

 private:
  std::size_t delta_;
  double l2_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> emission_;
  std::array<double, kAllowedTransitions> transitions_{};
};

double sequence_score(const CrfModel& model, std::span<const std::string> chars,
                      std::span<const Tag> labels);
double log_partition(const CrfModel& model, std::span<const std::string> chars);
// Per-position label marginals.
std::vector<std::array<double, kTags>> marginals(const CrfModel& model,
                                                 std::span<const std::string> chars);

struct LogLikelihood {
  double value = 0;
  std::vector<double> gradient;
};

// Regularized conditional log-likelihood and its gradient with respect to
// parameters(). Malformed gold labels raise DataError naming the index.
LogLikelihood log_likelihood_and_gradient(const CrfModel& model,
                                          std::span<const BmesSequence> data);

struct CrfOptions {
  std::size_t delta = 3;
  double l2 = 0.01;
  std::size_t max_iterations = 200;
  double tolerance = 1e-5;  // gradient norm
  std::size_t history = 10;
};

struct CrfTrace {
  std::vector<double> objectives;  // entry 0 is the zero model
};

CrfModel train_crf(const SegmentationDataset& dataset, const CrfOptions& options = {},
                   CrfTrace* trace = nullptr);

// Best labeling; among equal scores the lexicographically first under B<E<M<S.
std::vector<Tag> crf_viterbi(const CrfModel& model, std::span<const std::string> chars);
SegmentedWord crf_decode(const CrfModel& model, std::string_view word);

}  // namespace polyseg
