#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace polyseg {

enum class Split { train, dev, test };
enum class SegMode { surface, canonical };

std::string_view to_string(Split split);
std::string_view to_string(SegMode mode);
Split parse_split(std::string_view name);
SegMode parse_seg_mode(std::string_view name);

// One line of whitespace-tokenized text. Tokens are non-empty and contain
// no whitespace.
struct Sentence {
  std::vector<std::string> tokens;
};

struct SentencePair {
  Sentence source;
  Sentence target;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  Split split = Split::train;
};

// A word and its analysis. In surface mode the morphs concatenate to the
// surface form; canonical morphs may be spelled differently.
struct SegmentedWord {
  std::string surface;
  std::vector<std::string> morphs;
  SegMode mode = SegMode::surface;

  friend bool operator==(const SegmentedWord&, const SegmentedWord&) = default;
};

struct SegmentationDataset {
  std::vector<SegmentedWord> entries;
  SegMode mode = SegMode::surface;
  Split split = Split::train;
};

using WordCounts = std::map<std::string, std::uint64_t>;

// Throws DataError if a morph is empty or, in surface mode, the morphs do
// not concatenate to the surface.
void validate(const SegmentedWord& word);

Sentence tokenize(std::string_view line);

ParallelCorpus read_parallel(std::istream& source, std::istream& target,
                             Split split = Split::train);
ParallelCorpus load_parallel(const std::filesystem::path& source,
                             const std::filesystem::path& target,
                             Split split = Split::train);

// One sentence per line; empty lines are rejected.
std::vector<Sentence> read_sentences(std::istream& in, std::string_view name);
std::vector<Sentence> load_sentences(const std::filesystem::path& path);

// Format: surface<TAB>morph1 morph2 ...
SegmentationDataset read_segmentation(std::istream& in, SegMode mode,
                                      Split split = Split::train,
                                      std::string_view name = "<stream>");
SegmentationDataset load_segmentation(const std::filesystem::path& path,
                                      SegMode mode, Split split = Split::train);
void write_segmentation(std::ostream& out, const SegmentationDataset& data);

WordCounts count_words(const std::vector<Sentence>& sentences);

struct SideStats {
  std::uint64_t tokens = 0;     // N
  std::uint64_t types = 0;      // V
  std::uint64_t hapax = 0;      // V1
  double type_token_ratio = 0;  // V/N
  double hapax_ratio = 0;       // V1/N
  std::optional<std::uint64_t> oov_types;  // eval types absent from train
  std::optional<double> oov_rate;          // oov_types / V
};

struct CorpusStats {
  std::uint64_t sentences = 0;       // S
  SideStats source;
  SideStats target;
  double token_ratio = 0;            // N_target / N_source
};

SideStats side_stats(const std::vector<Sentence>& sentences,
                     const std::vector<Sentence>* reference_train = nullptr);

CorpusStats corpus_stats(const ParallelCorpus& corpus,
                         const ParallelCorpus* reference_train = nullptr);

struct SegDatasetStats {
  std::uint64_t words = 0;
  std::uint64_t seg_words = 0;   // entries with more than one morph
  std::uint64_t morphs = 0;      // morph tokens
  std::uint64_t uni_morphs = 0;  // morph types
  double seg_per_word = 0;
  double morphs_per_word = 0;
  std::uint64_t max_morphs = 0;
  std::optional<std::uint64_t> oov_morphs;  // eval morph types unseen in train
};

SegDatasetStats seg_stats(const SegmentationDataset& dataset,
                          const SegmentationDataset* reference_train = nullptr);

// TSV tables with fixed headers; ratios rendered from the raw counts.
void write_corpus_stats_tsv(std::ostream& out, const CorpusStats& stats,
                            char sep = '\t');
void write_seg_stats_tsv(std::ostream& out, const SegDatasetStats& stats,
                         char sep = '\t');

}  // namespace polyseg
