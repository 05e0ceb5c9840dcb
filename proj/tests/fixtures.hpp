#pragma once

// Deterministic synthetic data for tests.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "polyseg/corpus.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// A fresh, empty directory under the system temp dir.
fs::path scratch_dir(const std::string& name);

void write_lines(const fs::path& path, const std::vector<std::string>& lines);
std::string read_file(const fs::path& path);

// Token list with exactly `types` distinct words of which `hapax` occur
// once. The first `oov` types are fresh; the others come from `pool`.
struct SideCounts {
  std::uint64_t tokens;
  std::uint64_t types;
  std::uint64_t hapax;
  std::uint64_t oov = 0;
};
std::vector<std::string> side_tokens(const std::string& prefix, const SideCounts& counts,
                                     const std::vector<std::string>& pool, std::uint64_t seed);

// Distinct word types of a token list, in first-seen order.
std::vector<std::string> distinct(const std::vector<std::string>& tokens);

// Packs tokens into `sentences` non-empty lines.
std::vector<std::string> to_lines(const std::vector<std::string>& tokens, std::uint64_t sentences);

struct ParallelFiles {
  fs::path train_source, train_target, dev_source, dev_target;
};

// Train and dev files whose raw counts match the published tar-spa table.
ParallelFiles write_tar_spa_counts(const fs::path& dir);

struct SegCounts {
  std::uint64_t words;
  std::uint64_t seg_words;
  std::uint64_t morphs;
  std::uint64_t uni_morphs;
  std::uint64_t max_morphs;
  std::uint64_t oov_morphs = 0;  // relative to `pool`
};

// Dataset with exactly the requested counts. Morph types not counted as
// OOV are drawn from `pool`.
polyseg::SegmentationDataset seg_dataset(const std::string& prefix, const SegCounts& counts,
                                         polyseg::SegMode mode,
                                         const std::vector<std::string>& pool,
                                         std::uint64_t seed);

std::vector<std::string> morph_types(const polyseg::SegmentationDataset& data);

// Random word over the given characters.
std::string random_word(std::mt19937_64& rng, const std::vector<std::string>& alphabet,
                        std::size_t min_len, std::size_t max_len);

std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound);

}  // namespace fixtures
