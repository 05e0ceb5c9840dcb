#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fixtures {

std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

namespace {

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(rng, i)]);
}

}  // namespace

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("polyseg_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> side_tokens(const std::string& prefix, const SideCounts& c,
                                     const std::vector<std::string>& pool, std::uint64_t seed) {
  if (c.hapax > c.types || c.oov > c.types || (!pool.empty() && c.types - c.oov > pool.size())) {
    throw std::invalid_argument("inconsistent side counts");
  }
  const std::uint64_t multi = c.types - c.hapax;
  if (c.tokens < c.hapax + 2 * multi || (multi == 0 && c.tokens != c.hapax)) {
    throw std::invalid_argument("token budget cannot realise the type counts");
  }
  std::vector<std::string> types;
  for (std::uint64_t i = 0; i < c.types; ++i) {
    if (pool.empty()) {
      types.push_back(prefix + std::to_string(i));
    } else if (i < c.oov) {
      types.push_back(prefix + "x" + std::to_string(i));
    } else {
      types.push_back(pool[i - c.oov]);
    }
  }
  std::vector<std::uint64_t> counts(c.types, 1);
  std::uint64_t rest = c.tokens - c.hapax - 2 * multi;
  for (std::uint64_t k = 0; k < multi; ++k) {
    // Geometric-ish head so frequent types exist.
    const std::uint64_t extra = std::min(rest, rest / 4 + (rest > 0 ? 1 : 0));
    counts[c.hapax + k] = 2 + extra;
    rest -= extra;
  }
  if (multi > 0) counts[c.hapax] += rest;
  std::vector<std::string> tokens;
  tokens.reserve(c.tokens);
  for (std::uint64_t t = 0; t < c.types; ++t) tokens.insert(tokens.end(), counts[t], types[t]);
  std::mt19937_64 rng(seed);
  shuffle(tokens, rng);
  return tokens;
}

std::vector<std::string> distinct(const std::vector<std::string>& tokens) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

std::vector<std::string> to_lines(const std::vector<std::string>& tokens, std::uint64_t sentences) {
  if (sentences == 0 || tokens.size() < sentences) throw std::invalid_argument("too few tokens");
  std::vector<std::string> lines;
  const std::uint64_t base = tokens.size() / sentences;
  const std::uint64_t extra = tokens.size() % sentences;
  std::size_t pos = 0;
  for (std::uint64_t s = 0; s < sentences; ++s) {
    const std::uint64_t len = base + (s < extra ? 1 : 0);
    std::string line;
    for (std::uint64_t k = 0; k < len; ++k) {
      if (k > 0) line += ' ';
      line += tokens[pos++];
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

ParallelFiles write_tar_spa_counts(const fs::path& dir) {
  ParallelFiles f{dir / "train.tar", dir / "train.spa", dir / "dev.tar", dir / "dev.spa"};
  const auto tar_train = side_tokens("rt", {73022, 19044, 12894}, {}, 11);
  const auto spa_train = side_tokens("es", {93410, 16220, 10021}, {}, 12);
  const auto tar_dev = side_tokens("rt", {3183, 1713, 1402, 573}, distinct(tar_train), 13);
  const auto spa_dev = side_tokens("es", {4133, 1771, 1365, 434}, distinct(spa_train), 14);
  write_lines(f.train_source, to_lines(tar_train, 13102));
  write_lines(f.train_target, to_lines(spa_train, 13102));
  write_lines(f.dev_source, to_lines(tar_dev, 587));
  write_lines(f.dev_target, to_lines(spa_dev, 587));
  return f;
}

polyseg::SegmentationDataset seg_dataset(const std::string& prefix, const SegCounts& c,
                                         polyseg::SegMode mode,
                                         const std::vector<std::string>& pool,
                                         std::uint64_t seed) {
  const std::uint64_t single = c.words - c.seg_words;
  if (c.seg_words > c.words || c.morphs < single + 2 * c.seg_words ||
      c.uni_morphs > c.morphs) {
    throw std::invalid_argument("inconsistent segmentation counts");
  }
  // Morphs per word: singles get 1; segmented words start at 2 and absorb
  // the remainder, one word reaching max_morphs.
  std::vector<std::uint64_t> per_word(c.words, 1);
  std::uint64_t rest = c.morphs - single - 2 * c.seg_words;
  for (std::uint64_t w = single; w < c.words; ++w) per_word[w] = 2;
  for (std::uint64_t w = single; w < c.words && rest > 0; ++w) {
    const std::uint64_t add = std::min(rest, (w == single ? c.max_morphs : 3) - 2);
    per_word[w] += add;
    rest -= add;
  }
  if (rest > 0) throw std::invalid_argument("morph budget exceeds max_morphs");

  // Morph type names: OOV ones fresh, others from the pool, or all fresh.
  std::vector<std::string> types;
  for (std::uint64_t t = 0; t < c.uni_morphs; ++t) {
    if (pool.empty()) {
      types.push_back(prefix + std::to_string(t));
    } else if (t < c.oov_morphs) {
      types.push_back(prefix + "x" + std::to_string(t));
    } else {
      if (t - c.oov_morphs >= pool.size()) throw std::invalid_argument("morph pool too small");
      types.push_back(pool[t - c.oov_morphs]);
    }
  }
  // Every type once, then cycle through the types for the remaining slots.
  std::vector<std::string> stream;
  for (std::uint64_t k = 0; k < c.morphs; ++k) stream.push_back(types[k % types.size()]);
  std::mt19937_64 rng(seed);
  shuffle(stream, rng);

  polyseg::SegmentationDataset data;
  data.mode = mode;
  std::size_t pos = 0;
  for (std::uint64_t w = 0; w < c.words; ++w) {
    polyseg::SegmentedWord word;
    word.mode = mode;
    for (std::uint64_t k = 0; k < per_word[w]; ++k) word.morphs.push_back(stream[pos++]);
    for (const auto& m : word.morphs) word.surface += m;
    if (mode == polyseg::SegMode::canonical) word.surface += "'";
    data.entries.push_back(std::move(word));
  }
  shuffle(data.entries, rng);
  return data;
}

std::vector<std::string> morph_types(const polyseg::SegmentationDataset& data) {
  std::vector<std::string> tokens;
  for (const auto& e : data.entries) tokens.insert(tokens.end(), e.morphs.begin(), e.morphs.end());
  return distinct(tokens);
}

std::string random_word(std::mt19937_64& rng, const std::vector<std::string>& alphabet,
                        std::size_t min_len, std::size_t max_len) {
  const std::size_t len = min_len + below(rng, max_len - min_len + 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += alphabet[below(rng, alphabet.size())];
  return w;
}

}  // namespace fixtures
