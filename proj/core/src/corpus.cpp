#include "polyseg/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "polyseg/error.hpp"
#include "polyseg/report.hpp"
#include "polyseg/text.hpp"

namespace polyseg {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  return lines;
}

std::string located(std::string_view name, std::size_t line_no,
                    std::string_view message) {
  return std::string(name) + ":" + std::to_string(line_no) + ": " +
         std::string(message);
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

std::string_view to_string(SegMode mode) {
  return mode == SegMode::surface ? "surface" : "canonical";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "dev") return Split::dev;
  if (name == "test") return Split::test;
  throw UsageError("unknown split '" + std::string(name) + "'");
}

SegMode parse_seg_mode(std::string_view name) {
  if (name == "surface") return SegMode::surface;
  if (name == "canonical") return SegMode::canonical;
  throw UsageError("unknown segmentation mode '" + std::string(name) + "'");
}

void validate(const SegmentedWord& word) {
  if (word.surface.empty()) throw DataError("empty surface form");
  if (word.morphs.empty()) {
    throw DataError("'" + word.surface + "' has no morphs");
  }
  for (const auto& m : word.morphs) {
    if (m.empty()) throw DataError("'" + word.surface + "' has an empty morph");
  }
  if (word.mode == SegMode::surface) {
    const std::string joined = text::join(word.morphs, "");
    if (joined != word.surface) {
      throw DataError("surface '" + word.surface + "' != concatenation of morphs '" +
                      text::join(word.morphs, " ") + "'");
    }
  }
}

Sentence tokenize(std::string_view line) {
  return Sentence{text::split_whitespace(line)};
}

std::vector<Sentence> read_sentences(std::istream& in, std::string_view name) {
  std::vector<Sentence> out;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    Sentence s = tokenize(line);
    if (s.tokens.empty()) throw DataError(located(name, line_no, "empty line"));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sentence> load_sentences(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_sentences(in, path.string());
}

ParallelCorpus read_parallel(std::istream& source, std::istream& target,
                             Split split) {
  const auto src_lines = read_lines(source);
  const auto tgt_lines = read_lines(target);
  if (src_lines.size() != tgt_lines.size()) {
    throw AlignmentError("parallel files are not aligned: source has " +
                         std::to_string(src_lines.size()) +
                         " lines, target has " +
                         std::to_string(tgt_lines.size()));
  }
  ParallelCorpus corpus;
  corpus.split = split;
  corpus.pairs.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    SentencePair pair{tokenize(src_lines[i]), tokenize(tgt_lines[i])};
    if (pair.source.tokens.empty()) {
      throw DataError(located("source", i + 1, "empty line"));
    }
    if (pair.target.tokens.empty()) {
      throw DataError(located("target", i + 1, "empty line"));
    }
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

ParallelCorpus load_parallel(const std::filesystem::path& source,
                             const std::filesystem::path& target, Split split) {
  auto src = open_input(source);
  auto tgt = open_input(target);
  try {
    return read_parallel(src, tgt, split);
  } catch (const AlignmentError& e) {
    throw AlignmentError("'" + source.string() + "' vs '" + target.string() +
                         "': " + e.what());
  }
}

SegmentationDataset read_segmentation(std::istream& in, SegMode mode,
                                      Split split, std::string_view name) {
  SegmentationDataset data;
  data.mode = mode;
  data.split = split;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(located(name, line_no, "missing TAB between surface and morphs"));
    }
    SegmentedWord word;
    word.surface = line.substr(0, tab);
    word.morphs = text::split_whitespace(std::string_view(line).substr(tab + 1));
    word.mode = mode;
    if (word.surface.empty() || text::contains_space(word.surface)) {
      throw DataError(located(name, line_no, "surface must be one non-empty token"));
    }
    try {
      validate(word);
    } catch (const DataError& e) {
      throw DataError(located(name, line_no, e.what()));
    }
    data.entries.push_back(std::move(word));
  }
  return data;
}

SegmentationDataset load_segmentation(const std::filesystem::path& path,
                                      SegMode mode, Split split) {
  auto in = open_input(path);
  return read_segmentation(in, mode, split, path.string());
}

void write_segmentation(std::ostream& out, const SegmentationDataset& data) {
  for (const auto& e : data.entries) {
    out << e.surface << '\t' << text::join(e.morphs, " ") << '\n';
  }
}

WordCounts count_words(const std::vector<Sentence>& sentences) {
  WordCounts counts;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) ++counts[t];
  }
  return counts;
}

SideStats side_stats(const std::vector<Sentence>& sentences,
                     const std::vector<Sentence>* reference_train) {
  SideStats st;
  std::unordered_map<std::string_view, std::uint64_t> freq;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) ++freq[t];
    st.tokens += s.tokens.size();
  }
  st.types = freq.size();
  st.hapax = static_cast<std::uint64_t>(
      std::count_if(freq.begin(), freq.end(), [](const auto& kv) { return kv.second == 1; }));
  if (st.tokens > 0) {
    st.type_token_ratio = static_cast<double>(st.types) / static_cast<double>(st.tokens);
    st.hapax_ratio = static_cast<double>(st.hapax) / static_cast<double>(st.tokens);
  }
  if (reference_train != nullptr) {
    std::unordered_set<std::string_view> known;
    for (const auto& s : *reference_train) {
      for (const auto& t : s.tokens) known.insert(t);
    }
    std::uint64_t oov = 0;
    for (const auto& [type, _] : freq) {
      if (!known.contains(type)) ++oov;
    }
    st.oov_types = oov;
    st.oov_rate = st.types > 0 ? static_cast<double>(oov) / static_cast<double>(st.types) : 0.0;
  }
  return st;
}

CorpusStats corpus_stats(const ParallelCorpus& corpus,
                         const ParallelCorpus* reference_train) {
  if (corpus.pairs.empty()) throw DataError("corpus is empty");
  std::vector<Sentence> src, tgt;
  src.reserve(corpus.pairs.size());
  tgt.reserve(corpus.pairs.size());
  for (const auto& p : corpus.pairs) {
    src.push_back(p.source);
    tgt.push_back(p.target);
  }
  std::vector<Sentence> ref_src, ref_tgt;
  if (reference_train != nullptr) {
    for (const auto& p : reference_train->pairs) {
      ref_src.push_back(p.source);
      ref_tgt.push_back(p.target);
    }
  }
  CorpusStats st;
  st.sentences = corpus.pairs.size();
  st.source = side_stats(src, reference_train ? &ref_src : nullptr);
  st.target = side_stats(tgt, reference_train ? &ref_tgt : nullptr);
  st.token_ratio = static_cast<double>(st.target.tokens) / static_cast<double>(st.source.tokens);
  return st;
}

SegDatasetStats seg_stats(const SegmentationDataset& dataset,
                          const SegmentationDataset* reference_train) {
  if (dataset.entries.empty()) throw DataError("segmentation dataset is empty");
  SegDatasetStats st;
  std::set<std::string_view> types;
  for (const auto& e : dataset.entries) {
    ++st.words;
    if (e.morphs.size() > 1) ++st.seg_words;
    st.morphs += e.morphs.size();
    st.max_morphs = std::max<std::uint64_t>(st.max_morphs, e.morphs.size());
    for (const auto& m : e.morphs) types.insert(m);
  }
  st.uni_morphs = types.size();
  st.seg_per_word = static_cast<double>(st.seg_words) / static_cast<double>(st.words);
  st.morphs_per_word = static_cast<double>(st.morphs) / static_cast<double>(st.words);
  if (reference_train != nullptr) {
    std::set<std::string_view> known;
    for (const auto& e : reference_train->entries) {
      for (const auto& m : e.morphs) known.insert(m);
    }
    st.oov_morphs = static_cast<std::uint64_t>(std::count_if(
        types.begin(), types.end(), [&](std::string_view m) { return !known.contains(m); }));
  }
  return st;
}

namespace {

void write_side(std::ostream& out, std::string_view side, std::uint64_t sentences,
                const SideStats& st, char sep) {
  using report::format_ratio;
  out << side << sep << sentences << sep << st.tokens << sep << st.types << sep
      << st.hapax << sep << format_ratio(st.types, st.tokens, 3) << sep
      << format_ratio(st.hapax, st.tokens, 3) << sep;
  if (st.oov_types) {
    // truncated, not rounded
    out << *st.oov_types << sep
        << format_ratio(*st.oov_types, st.types, 3, report::Rounding::truncate);
  } else {
    out << '-' << sep << '-';
  }
  out << '\n';
}

}  // namespace

void write_corpus_stats_tsv(std::ostream& out, const CorpusStats& stats, char sep) {
  out << "side" << sep << "S" << sep << "N" << sep << "V" << sep << "V1" << sep
      << "V/N" << sep << "V1/N" << sep << "OOV" << sep << "pctOOV" << '\n';
  write_side(out, "source", stats.sentences, stats.source, sep);
  write_side(out, "target", stats.sentences, stats.target, sep);
}

void write_seg_stats_tsv(std::ostream& out, const SegDatasetStats& st, char sep) {
  using report::format_ratio;
  out << "Words" << sep << "SegWords" << sep << "Morphs" << sep << "UniMorphs"
      << sep << "Seg/W" << sep << "Morphs/W" << sep << "MaxMorphs" << sep
      << "OOV-M" << '\n';
  out << st.words << sep << st.seg_words << sep << st.morphs << sep
      << st.uni_morphs << sep << format_ratio(st.seg_words, st.words, 2) << sep
      << format_ratio(st.morphs, st.words, 2) << sep << st.max_morphs << sep;
  if (st.oov_morphs) {
    out << *st.oov_morphs;
  } else {
    out << '-';
  }
  out << '\n';
}

}  // namespace polyseg
