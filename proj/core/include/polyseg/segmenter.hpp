#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polyseg/model_io.hpp"

namespace polyseg {

// How pieces of one word are marked in segmented text. Morf and CRF
// models put "@@" on every non-final morph; BPE glues its end-of-word
// marker to the final piece.
enum class MarkerStyle { continuation, word_end };

inline constexpr std::string_view kContinuationMarker = "@@";

struct MarkerConvention {
  MarkerStyle style = MarkerStyle::continuation;
  std::string marker{kContinuationMarker};
};

MarkerConvention marker_convention(const AnyModel& model);

class Segmenter {
 public:
  explicit Segmenter(AnyModel model);

  const AnyModel& model() const noexcept { return model_; }
  const MarkerConvention& convention() const noexcept { return convention_; }

  // Unmarked analysis of one word.
  std::vector<std::string> morphs(std::string_view word);
  // Pieces carrying the family's marker.
  std::vector<std::string> pieces(std::string_view word);
  // Replaces each token by its space-joined pieces and keeps all original
  // whitespace, so desegment_line restores the input byte for byte.
  std::string segment_line(std::string_view line);

 private:
  AnyModel model_;
  MarkerConvention convention_;
  std::unordered_map<std::string, std::vector<std::string>> cache_;
};

// Inverse of Segmenter::segment_line. Stray markers raise DataError with
// the 1-based line and column (in characters).
std::string desegment_line(std::string_view line, const MarkerConvention& convention,
                           std::size_t line_no = 1);

}  // namespace polyseg
