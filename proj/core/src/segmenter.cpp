#include "polyseg/segmenter.hpp"

#include "polyseg/error.hpp"
#include "polyseg/text.hpp"

namespace polyseg {
namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

[[noreturn]] void format_error(std::string_view line, std::size_t line_no, std::size_t byte,
                               const std::string& what) {
  const std::size_t column = text::char_length(line.substr(0, byte)) + 1;
  throw DataError("line " + std::to_string(line_no) + ", column " + std::to_string(column) +
                  ": " + what);
}

// Byte length of the whitespace code point starting at s[i], or 0.
std::size_t space_at(std::string_view s, std::size_t i) {
  const auto lead = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  if (lead >= 0xF0) {
    len = 4;
  } else if (lead >= 0xE0) {
    len = 3;
  } else if (lead >= 0xC0) {
    len = 2;
  }
  if (i + len > s.size()) return 0;
  const auto cps = text::decode(s.substr(i, len));
  return cps.size() == 1 && text::is_space(cps[0]) ? len : 0;
}

struct Span {
  std::size_t begin;
  std::size_t end;
  bool space;
};

// Alternating runs of whitespace and non-whitespace.
std::vector<Span> runs(std::string_view line) {
  text::decode(line);  // validates UTF-8
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const std::size_t start = i;
    const bool space = space_at(line, i) > 0;
    while (i < line.size()) {
      const std::size_t w = space_at(line, i);
      if ((w > 0) != space) break;
      if (w > 0) {
        i += w;
      } else {
        ++i;
        while (i < line.size() && (static_cast<unsigned char>(line[i]) & 0xC0) == 0x80) ++i;
      }
    }
    out.push_back({start, i, space});
  }
  return out;
}

}  // namespace

MarkerConvention marker_convention(const AnyModel& model) {
  if (const auto* bpe = std::get_if<BpeModel>(&model)) {
    return {MarkerStyle::word_end, bpe->marker()};
  }
  return {MarkerStyle::continuation, std::string(kContinuationMarker)};
}

Segmenter::Segmenter(AnyModel model)
    : model_(std::move(model)), convention_(marker_convention(model_)) {}

std::vector<std::string> Segmenter::morphs(std::string_view word) {
  if (word.find(convention_.marker) != std::string_view::npos) {
    throw DataError("word '" + std::string(word) + "' contains the reserved marker '" +
                    convention_.marker + "'");
  }
  if (const auto* bpe = std::get_if<BpeModel>(&model_)) {
    std::vector<std::string> out;
    for (auto& p : bpe->encode(word)) {
      if (ends_with(p.text, bpe->marker())) p.text.resize(p.text.size() - bpe->marker().size());
      out.push_back(std::move(p.text));
    }
    return out;
  }
  if (const auto* morf = std::get_if<MorfModel>(&model_)) return segment(*morf, word);
  return crf_decode(std::get<CrfModel>(model_), word).morphs;
}

std::vector<std::string> Segmenter::pieces(std::string_view word) {
  const std::string key(word);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  auto out = morphs(word);
  if (convention_.style == MarkerStyle::word_end) {
    out.back() += convention_.marker;
  } else {
    for (std::size_t k = 0; k + 1 < out.size(); ++k) out[k] += convention_.marker;
  }
  cache_.emplace(key, out);
  return out;
}

std::string Segmenter::segment_line(std::string_view line) {
  std::string out;
  out.reserve(line.size() * 2);
  for (const auto& r : runs(line)) {
    const auto chunk = line.substr(r.begin, r.end - r.begin);
    if (r.space) {
      out += chunk;
    } else {
      out += text::join(pieces(chunk), " ");
    }
  }
  return out;
}

std::string desegment_line(std::string_view line, const MarkerConvention& convention,
                           std::size_t line_no) {
  const std::string_view marker = convention.marker;
  const auto spans = runs(line);
  std::string out;
  out.reserve(line.size());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto& r = spans[k];
    std::string_view chunk = line.substr(r.begin, r.end - r.begin);
    if (r.space) {
      out += chunk;
      continue;
    }
    const auto pos = chunk.find(marker);
    if (pos != std::string_view::npos && pos + marker.size() != chunk.size()) {
      format_error(line, line_no, r.begin + pos, "boundary marker inside a piece");
    }
    const bool marked = pos != std::string_view::npos;
    const bool continues = convention.style == MarkerStyle::continuation ? marked : !marked;
    if (marked) chunk.remove_suffix(marker.size());
    if (chunk.empty()) format_error(line, line_no, r.begin, "piece consists of the marker only");
    out += chunk;
    if (!continues) continue;
    // The next run must be exactly the single space inserted by segmentation.
    const bool joined = k + 2 < spans.size() &&
                        line.substr(spans[k + 1].begin, spans[k + 1].end - spans[k + 1].begin) == " ";
    if (!joined) {
      format_error(line, line_no, r.end,
                   convention.style == MarkerStyle::continuation
                       ? "continuation marker not followed by a piece"
                       : "word-final piece lacks the end-of-word marker");
    }
    ++k;  // drop the joining space
  }
  return out;
}

}  // namespace polyseg
