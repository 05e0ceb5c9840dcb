#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "polyseg/bpe.hpp"
#include "polyseg/error.hpp"

using namespace polyseg;

namespace {

std::vector<std::string> texts(const std::vector<BpePiece>& pieces) {
  std::vector<std::string> out;
  for (const auto& p : pieces) out.push_back(p.text);
  return out;
}

std::uint64_t total_pieces(const BpeModel& m, const WordCounts& counts) {
  std::uint64_t n = 0;
  for (const auto& [w, c] : counts) n += c * m.encode(w).size();
  return n;
}

}  // namespace

TEST(Bpe, FirstMergeIsMostFrequentPair) {
  WordCounts counts{{"aaab", 2}, {"aab", 1}};
  // alphabet: a, b</w>; one merge fits in a budget of 3
  auto m = train_bpe(counts, 3);
  ASSERT_EQ(m.merges().size(), 1u);
  EXPECT_EQ(m.merges()[0], (BpeMerge{"a", "a"}));
}

TEST(Bpe, NoBudgetMeansCharacters) {
  auto m = train_bpe({{"ab", 1}}, 2);
  EXPECT_TRUE(m.merges().empty());
  EXPECT_EQ(texts(m.encode("ab")), (std::vector<std::string>{"a", "b</w>"}));
}

TEST(Bpe, ZeroMergeEncode) {
  BpeModel m(10, "</w>", {"a", "b", "c</w>"}, {});
  EXPECT_EQ(texts(m.encode("abc")), (std::vector<std::string>{"a", "b", "c</w>"}));
}

TEST(Bpe, ReplayEncode) {
  BpeModel m(10, "</w>", {"a", "b</w>"}, {{"a", "a"}});
  EXPECT_EQ(texts(m.encode("aaab")), (std::vector<std::string>{"aa", "a", "b</w>"}));
}

TEST(Bpe, UnseenCharactersFlagged) {
  BpeModel m(10, "</w>", {"a", "a</w>"}, {});
  auto pieces = m.encode("axa");
  ASSERT_EQ(pieces.size(), 3u);
  EXPECT_FALSE(pieces[0].unknown);
  EXPECT_TRUE(pieces[1].unknown);
  EXPECT_FALSE(pieces[2].unknown);
}

TEST(Bpe, StopsWhenNoPairRepeats) {
  auto m = train_bpe({{"abcd", 1}}, 100);
  EXPECT_TRUE(m.merges().empty());
}

TEST(Bpe, MergedSymbolsAreConcatenations) {
  WordCounts counts{{"lower", 5}, {"low", 7}, {"newest", 6}, {"widest", 3}};
  auto m = train_bpe(counts, 30);
  for (const auto& [l, r] : m.merges()) EXPECT_TRUE(m.vocab().count(l + r));
  BpeModel replay(m.target_vocab_size(), m.marker(), m.initial_symbols(), m.merges());
  EXPECT_EQ(replay.vocab(), m.vocab());
}

TEST(Bpe, OracleEquivalenceAndMonotonicity) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> alphabet{"a", "b", "c", "ñ", "ü"};
  for (int trial = 0; trial < 20; ++trial) {
    WordCounts counts;
    while (counts.size() < 12) {
      counts[fixtures::random_word(rng, alphabet, 1, 7)] += 1 + fixtures::below(rng, 4);
    }
    auto m = train_bpe(counts, 40);
    EXPECT_EQ(m.merges(), oracle::bpe_merges(counts, 40)) << "trial " << trial;
    std::uint64_t prev = UINT64_MAX;
    for (std::size_t k = 0; k <= m.merges().size(); ++k) {
      std::vector<BpeMerge> prefix(m.merges().begin(), m.merges().begin() + k);
      BpeModel partial(40, "</w>", m.initial_symbols(), prefix);
      const auto n = total_pieces(partial, counts);
      EXPECT_LT(n, prev);
      prev = n;
    }
  }
}

TEST(Bpe, Deterministic) {
  WordCounts counts{{"abab", 3}, {"baba", 3}, {"abba", 2}};
  EXPECT_EQ(train_bpe(counts, 12).merges(), train_bpe(counts, 12).merges());
}

TEST(Bpe, RoundTripFuzz) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> alphabet{"a", "b", "e", "ɨ", "ʼ", "中", "😀"};
  WordCounts counts;
  for (int i = 0; i < 50; ++i) counts[fixtures::random_word(rng, alphabet, 1, 8)]++;
  auto m = train_bpe(counts, 60);
  for (int i = 0; i < 2000; ++i) {
    const auto w = fixtures::random_word(rng, alphabet, 1, 12);
    EXPECT_EQ(bpe_decode(texts(m.encode(w))), w);
  }
}

TEST(Bpe, DecodeExamples) {
  EXPECT_EQ(bpe_decode(std::vector<std::string>{"aa", "a", "b</w>"}), "aaab");
  EXPECT_EQ(bpe_decode(std::vector<std::string>{"a</w>"}), "a");
  EXPECT_THROW(bpe_decode(std::vector<std::string>{"a</w>", "b</w>"}), DataError);
  EXPECT_THROW(bpe_decode(std::vector<std::string>{}), DataError);
}
