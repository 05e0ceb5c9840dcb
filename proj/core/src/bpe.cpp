#include "polyseg/bpe.hpp"

#include <map>
#include <unordered_map>

#include "polyseg/error.hpp"
#include "polyseg/text.hpp"

namespace polyseg {
namespace {

void check_word(std::string_view word, std::string_view marker) {
  if (word.empty()) throw DataError("cannot encode an empty word");
  if (word.find(marker) != std::string_view::npos) {
    throw DataError("word '" + std::string(word) + "' contains the reserved marker '" +
                    std::string(marker) + "'");
  }
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

using SymbolId = int;
using PairKey = std::pair<SymbolId, SymbolId>;

struct PairKeyHash {
  std::size_t operator()(const PairKey& p) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(p.first) << 32) ^
                                      static_cast<std::uint32_t>(p.second));
  }
};

// Interns symbol strings so training works on integer ids.
class SymbolTable {
 public:
  SymbolId intern(const std::string& s) {
    auto [it, inserted] = ids_.try_emplace(s, static_cast<SymbolId>(names_.size()));
    if (inserted) names_.push_back(s);
    return it->second;
  }
  const std::string& name(SymbolId id) const { return names_[static_cast<std::size_t>(id)]; }

 private:
  std::unordered_map<std::string, SymbolId> ids_;
  std::vector<std::string> names_;
};

// Priority order: higher count first, then lexicographic (left, right).
struct Candidate {
  std::int64_t count;
  std::string left;
  std::string right;
  PairKey key;

  bool operator<(const Candidate& o) const {
    if (count != o.count) return count > o.count;
    if (left != o.left) return left < o.left;
    return right < o.right;
  }
};

struct TrainWord {
  std::vector<SymbolId> symbols;
  std::int64_t count;
};

class PairStats {
 public:
  explicit PairStats(const SymbolTable& table) : table_(table) {}

  void add_word(const TrainWord& w, std::size_t index, std::int64_t sign) {
    for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
      const PairKey key{w.symbols[i], w.symbols[i + 1]};
      bump(key, sign * w.count);
      if (sign > 0) {
        occurrences_[key].insert(index);
      } else if (auto it = occurrences_.find(key); it != occurrences_.end()) {
        it->second.erase(index);
      }
    }
  }

  bool empty() const { return queue_.empty(); }
  const Candidate& best() const { return *queue_.begin(); }

  std::set<std::size_t> words_with(const PairKey& key) const {
    auto it = occurrences_.find(key);
    return it == occurrences_.end() ? std::set<std::size_t>{} : it->second;
  }

 private:
  void bump(const PairKey& key, std::int64_t delta) {
    auto& count = counts_[key];
    if (count > 0) queue_.erase(Candidate{count, table_.name(key.first), table_.name(key.second), key});
    count += delta;
    if (count > 0) {
      queue_.insert(Candidate{count, table_.name(key.first), table_.name(key.second), key});
    }
  }

  const SymbolTable& table_;
  std::unordered_map<PairKey, std::int64_t, PairKeyHash> counts_;
  std::unordered_map<PairKey, std::set<std::size_t>, PairKeyHash> occurrences_;
  std::set<Candidate> queue_;
};

// Left-to-right, non-overlapping replacement of (left, right) by merged.
template <typename T>
bool apply_merge(std::vector<T>& symbols, const T& left, const T& right, const T& merged) {
  std::size_t i = 0;
  while (i + 1 < symbols.size() && !(symbols[i] == left && symbols[i + 1] == right)) ++i;
  if (i + 1 >= symbols.size()) return false;
  std::vector<T> out(symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(i));
  out.reserve(symbols.size());
  for (; i < symbols.size(); ++i) {
    if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
      out.push_back(merged);
      ++i;
    } else {
      out.push_back(symbols[i]);
    }
  }
  symbols = std::move(out);
  return true;
}

}  // namespace

std::vector<std::string> bpe_initial_symbols(std::string_view word,
                                             std::string_view marker) {
  auto symbols = text::split_chars(word);
  if (!symbols.empty()) symbols.back() += marker;
  return symbols;
}

BpeModel::BpeModel(std::size_t target_vocab_size, std::string marker,
                   std::set<std::string> initial_symbols, std::vector<BpeMerge> merges)
    : target_vocab_size_(target_vocab_size),
      marker_(std::move(marker)),
      initial_symbols_(std::move(initial_symbols)),
      merges_(std::move(merges)) {
  if (marker_.empty() || text::contains_space(marker_)) {
    throw DataError("BPE marker must be a non-empty, whitespace-free string");
  }
  for (const auto& s : initial_symbols_) {
    std::string_view base = s;
    if (ends_with(base, marker_)) base.remove_suffix(marker_.size());
    if (text::char_length(base) != 1) {
      throw DataError("initial BPE symbol '" + s + "' is not a single character");
    }
    characters_.emplace(base);
  }
  vocab_ = initial_symbols_;
  for (std::size_t r = 0; r < merges_.size(); ++r) {
    vocab_.insert(merges_[r].first + merges_[r].second);
    ranks_.try_emplace(merges_[r], r);
  }
}

std::vector<BpePiece> BpeModel::encode(std::string_view word) const {
  check_word(word, marker_);
  auto symbols = bpe_initial_symbols(word, marker_);
  // Replaying merges in learned order is equivalent to repeatedly applying
  // the lowest-ranked present pair whose rank exceeds the last one applied:
  // the ranks skipped over are no-ops at that point.
  std::size_t floor_rank = 0;
  while (symbols.size() > 1) {
    std::size_t best = merges_.size();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = ranks_.find(BpeMerge{symbols[i], symbols[i + 1]});
      if (it != ranks_.end() && it->second >= floor_rank && it->second < best) best = it->second;
    }
    if (best == merges_.size()) break;
    const auto& [left, right] = merges_[best];
    apply_merge(symbols, left, right, left + right);
    floor_rank = best + 1;
  }
  std::vector<BpePiece> pieces;
  pieces.reserve(symbols.size());
  for (auto& s : symbols) {
    bool unknown = false;
    if (!vocab_.contains(s)) {
      std::string_view base = s;
      if (ends_with(base, marker_)) base.remove_suffix(marker_.size());
      unknown = !characters_.contains(std::string(base));
    }
    pieces.push_back(BpePiece{std::move(s), unknown});
  }
  return pieces;
}

BpeModel train_bpe(const WordCounts& word_counts, std::size_t target_vocab_size,
                   std::string_view marker) {
  if (word_counts.empty()) throw DataError("BPE training needs at least one word");
  SymbolTable table;
  std::vector<TrainWord> words;
  std::set<std::string> initial;
  words.reserve(word_counts.size());
  for (const auto& [word, count] : word_counts) {
    check_word(word, marker);
    if (text::contains_space(word)) throw DataError("word '" + word + "' contains whitespace");
    TrainWord tw{{}, static_cast<std::int64_t>(count)};
    for (const auto& s : bpe_initial_symbols(word, marker)) {
      initial.insert(s);
      tw.symbols.push_back(table.intern(s));
    }
    words.push_back(std::move(tw));
  }

  PairStats stats(table);
  for (std::size_t i = 0; i < words.size(); ++i) stats.add_word(words[i], i, +1);

  std::set<std::string> vocab = initial;
  std::vector<BpeMerge> merges;
  while (vocab.size() < target_vocab_size && !stats.empty()) {
    const Candidate best = stats.best();
    if (best.count < 2) break;
    const std::string merged = best.left + best.right;
    const SymbolId merged_id = table.intern(merged);
    merges.emplace_back(best.left, best.right);
    vocab.insert(merged);
    for (std::size_t index : stats.words_with(best.key)) {
      auto& w = words[index];
      stats.add_word(w, index, -1);
      apply_merge(w.symbols, best.key.first, best.key.second, merged_id);
      stats.add_word(w, index, +1);
    }
  }
  return BpeModel(target_vocab_size, std::string(marker), std::move(initial), std::move(merges));
}

std::string bpe_decode(std::span<const std::string> pieces, std::string_view marker) {
  if (pieces.empty()) throw DataError("cannot decode an empty piece sequence");
  std::string word;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    std::string_view piece = pieces[i];
    const bool last = i + 1 == pieces.size();
    const auto pos = piece.find(marker);
    if (pos != std::string_view::npos && (!last || pos + marker.size() != piece.size())) {
      throw DataError("boundary marker in non-final position (piece " +
                      std::to_string(i + 1) + " '" + std::string(piece) + "')");
    }
    if (last) {
      if (pos == std::string_view::npos) {
        throw DataError("final piece '" + std::string(piece) + "' lacks the boundary marker");
      }
      piece.remove_suffix(marker.size());
    }
    word += piece;
  }
  if (word.empty()) throw DataError("decoded word is empty");
  return word;
}

}  // namespace polyseg
