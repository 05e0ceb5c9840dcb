#include "polyseg/morfessor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "detail/random.hpp"
#include "polyseg/error.hpp"
#include "polyseg/flatcat.hpp"
#include "polyseg/text.hpp"

namespace polyseg {

std::string_view to_string(MorfVariant v) {
  switch (v) {
    case MorfVariant::baseline: return "baseline";
    case MorfVariant::lmvr: return "lmvr";
    case MorfVariant::flatcat: return "flatcat";
  }
  return "baseline";
}

MorfVariant parse_morf_variant(std::string_view name) {
  if (name == "baseline" || name == "morfessor") return MorfVariant::baseline;
  if (name == "lmvr") return MorfVariant::lmvr;
  if (name == "flatcat") return MorfVariant::flatcat;
  throw DataError("unknown morf variant '" + std::string(name) + "'");
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::pre: return "PRE";
    case Category::stm: return "STM";
    case Category::suf: return "SUF";
    case Category::non: return "NON";
  }
  return "STM";
}

namespace {

double char_code_length(std::size_t alphabet_size) {
  return std::log(static_cast<double>(alphabet_size) + 1.0);
}

double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

// Tracks the MDL objective under count updates in O(1).
class CostTracker {
 public:
  CostTracker(double alpha, std::size_t alphabet_size)
      : alpha_(alpha), char_bits_(char_code_length(alphabet_size)) {}

  void add(const std::string& morph, std::uint64_t weight) {
    auto& c = counts_[morph];
    if (c == 0) enter(morph);
    sum_xlogx_ += xlogx(static_cast<double>(c + weight)) - xlogx(static_cast<double>(c));
    c += weight;
    tokens_ += weight;
  }

  void remove(const std::string& morph, std::uint64_t weight) {
    auto it = counts_.find(morph);
    if (it == counts_.end() || it->second < weight) {
      throw NumericError("morph count underflow for '" + morph + "'");
    }
    auto& c = it->second;
    sum_xlogx_ += xlogx(static_cast<double>(c - weight)) - xlogx(static_cast<double>(c));
    c -= weight;
    tokens_ -= weight;
    if (c == 0) {
      leave(morph);
      counts_.erase(it);
    }
  }

  bool contains(const std::string& morph) const { return counts_.contains(morph); }

  double corpus_cost() const {
    return xlogx(static_cast<double>(tokens_)) - sum_xlogx_;
  }
  double lexicon_cost() const { return static_cast<double>(lexicon_units_) * char_bits_; }
  double total() const { return corpus_cost() + alpha_ * lexicon_cost(); }
  std::size_t multichar_types() const { return multichar_types_; }

  // Recomputes the running sum from scratch to stop drift accumulating.
  void resync() {
    sum_xlogx_ = 0;
    for (const auto& [_, c] : counts_) sum_xlogx_ += xlogx(static_cast<double>(c));
  }

  const std::unordered_map<std::string, std::uint64_t>& counts() const { return counts_; }
  std::uint64_t tokens() const { return tokens_; }

 private:
  void enter(const std::string& morph) {
    const auto len = text::char_length(morph);
    lexicon_units_ += len + 1;
    if (len > 1) ++multichar_types_;
  }
  void leave(const std::string& morph) {
    const auto len = text::char_length(morph);
    lexicon_units_ -= len + 1;
    if (len > 1) --multichar_types_;
  }

  double alpha_;
  double char_bits_;
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t tokens_ = 0;
  double sum_xlogx_ = 0;
  std::uint64_t lexicon_units_ = 0;
  std::size_t multichar_types_ = 0;
};

struct WordState {
  std::string word;
  std::uint64_t weight;
  std::vector<std::string> analysis;
};

// Byte offsets of code point boundaries, including 0 and size().
std::vector<std::size_t> char_boundaries(std::string_view word) {
  std::vector<std::size_t> cuts{0};
  for (std::size_t i = 1; i < word.size(); ++i) {
    if ((static_cast<unsigned char>(word[i]) & 0xC0) != 0x80) cuts.push_back(i);
  }
  cuts.push_back(word.size());
  return cuts;
}

class Trainer {
 public:
  Trainer(const WordCounts& word_counts, double alpha, CountWeighting weighting,
          std::optional<std::size_t> cap, TrainingTrace* trace)
      : alphabet_(collect_alphabet(word_counts)),
        tracker_(alpha, alphabet_.size()),
        alpha_(alpha),
        weighting_(weighting),
        cap_(cap),
        trace_(trace) {
    if (!(alpha > 0) || !std::isfinite(alpha)) {
      throw ConfigError("corpus weight alpha must be positive and finite");
    }
    if (cap_ && *cap_ < alphabet_.size()) {
      throw ConfigError("lexicon size cap " + std::to_string(*cap_) +
                        " cannot cover the alphabet of " + std::to_string(alphabet_.size()) +
                        " characters");
    }
    words_.reserve(word_counts.size());
    for (const auto& [word, count] : word_counts) {
      if (word.empty() || text::contains_space(word)) {
        throw DataError("invalid training word '" + word + "'");
      }
      const std::uint64_t weight = weighting == CountWeighting::types ? 1 : count;
      if (weight == 0) continue;
      words_.push_back(WordState{word, weight, {}});
    }
    if (words_.empty()) throw DataError("training needs at least one word");
  }

  void initialize() {
    for (auto& w : words_) {
      tracker_.add(w.word, w.weight);
      if (admissible()) {
        w.analysis = {w.word};
      } else {
        tracker_.remove(w.word, w.weight);
        w.analysis = resegment(w.word, w.weight);
      }
      accept();
    }
  }

  void run(std::uint64_t seed, double epsilon, std::size_t max_epochs) {
    initialize();
    record_epoch();
    std::vector<std::size_t> order(words_.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
      const double before = tracker_.total();
      detail::shuffle(order, rng);
      for (std::size_t index : order) optimize_word(words_[index]);
      const double after = record_epoch();
      if (before - after < epsilon) break;
    }
  }

  MorfModel model(MorfVariant variant) const {
    MorfModel m;
    m.variant = variant;
    m.weighting = weighting_;
    m.alpha = alpha_;
    m.max_lexicon_size = cap_;
    m.alphabet = alphabet_;
    for (const auto& [morph, count] : tracker_.counts()) m.lexicon.emplace(morph, count);
    m.total_tokens = tracker_.tokens();
    for (const auto& w : words_) m.analyses.emplace(w.word, w.analysis);
    return m;
  }

 private:
  static std::set<std::string> collect_alphabet(const WordCounts& word_counts) {
    std::set<std::string> out;
    for (const auto& [word, _] : word_counts) {
      for (auto& c : text::split_chars(word)) out.insert(std::move(c));
    }
    return out;
  }

  std::size_t measure() const { return alphabet_.size() + tracker_.multichar_types(); }
  bool admissible() const { return !cap_ || measure() <= *cap_; }

  void accept() {
    if (!admissible()) {
      throw NumericError("lexicon size cap violated: " + std::to_string(measure()) + " > " +
                         std::to_string(*cap_));
    }
    if (trace_ != nullptr) {
      ++trace_->accepted_states;
      trace_->max_lexicon_measure = std::max(trace_->max_lexicon_measure, measure());
    }
  }

  double record_epoch() {
    MorfModel snapshot = model(MorfVariant::baseline);
    const double recomputed = mdl_cost(snapshot).total;
    const double tracked = tracker_.total();
    if (std::abs(recomputed - tracked) > 1e-6 * std::max(1.0, std::abs(recomputed))) {
      throw NumericError("tracked MDL cost drifted from recomputed value");
    }
    tracker_.resync();
    if (trace_ != nullptr) trace_->epoch_costs.push_back(tracker_.total());
    return tracker_.total();
  }

  void optimize_word(WordState& w) {
    const double before = tracker_.total();
    for (const auto& m : w.analysis) tracker_.remove(m, w.weight);
    auto analysis = resegment(w.word, w.weight);
    if (tracker_.total() > before) {
      for (const auto& m : analysis) tracker_.remove(m, w.weight);
      for (const auto& m : w.analysis) tracker_.add(m, w.weight);
    } else {
      w.analysis = std::move(analysis);
    }
    accept();
  }

  // Chooses between keeping `s` whole and every binary split, then recurses
  // into both halves of the winning split. Leaves the chosen morphs added.
  std::vector<std::string> resegment(const std::string& s, std::uint64_t weight) {
    const auto cuts = char_boundaries(s);
    constexpr double inf = std::numeric_limits<double>::infinity();

    double whole_cost = inf;
    tracker_.add(s, weight);
    if (admissible()) whole_cost = tracker_.total();
    tracker_.remove(s, weight);

    double best_split_cost = inf;
    double fallback_cost = inf;
    std::size_t best_cut = 0;
    std::size_t fallback_cut = 0;
    for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
      const std::string left = s.substr(0, cuts[k]);
      const std::string right = s.substr(cuts[k]);
      tracker_.add(left, weight);
      tracker_.add(right, weight);
      const double c = tracker_.total();
      const bool ok = admissible();
      tracker_.remove(right, weight);
      tracker_.remove(left, weight);
      if (ok && c < best_split_cost) {
        best_split_cost = c;
        best_cut = cuts[k];
      }
      if (c < fallback_cost) {
        fallback_cost = c;
        fallback_cut = cuts[k];
      }
    }
    if (best_cut == 0 && whole_cost == inf) {
      // Nothing admissible at this level: split anyway and let the halves
      // recurse down towards single characters, which are always allowed.
      best_cut = fallback_cut;
      best_split_cost = fallback_cost;
    }

    if (best_cut == 0 || whole_cost <= best_split_cost) {
      tracker_.add(s, weight);
      return {s};
    }

    const std::string left = s.substr(0, best_cut);
    const std::string right = s.substr(best_cut);
    tracker_.add(right, weight);
    auto out = resegment(left, weight);
    tracker_.remove(right, weight);
    auto tail = resegment(right, weight);
    out.insert(out.end(), std::make_move_iterator(tail.begin()),
               std::make_move_iterator(tail.end()));
    return out;
  }

  std::set<std::string> alphabet_;
  CostTracker tracker_;
  double alpha_;
  CountWeighting weighting_;
  std::optional<std::size_t> cap_;
  TrainingTrace* trace_;
  std::vector<WordState> words_;
};

}  // namespace

MdlCost mdl_cost(const MorfModel& model) {
  MdlCost cost;
  const double total = static_cast<double>(model.total_tokens);
  const double per_char = char_code_length(model.alphabet.size());
  for (const auto& [morph, count] : model.lexicon) {
    const double c = static_cast<double>(count);
    if (count > 0) cost.corpus_cost -= c * std::log(c / total);
    cost.lexicon_cost += static_cast<double>(text::char_length(morph) + 1) * per_char;
  }
  cost.total = cost.corpus_cost + model.alpha * cost.lexicon_cost;
  return cost;
}

std::size_t lexicon_measure(const MorfModel& model) {
  std::size_t multichar = 0;
  for (const auto& [morph, count] : model.lexicon) {
    if (text::char_length(morph) > 1) ++multichar;
  }
  return model.alphabet.size() + multichar;
}

void check_consistent(const MorfModel& model) {
  std::uint64_t sum = 0;
  for (const auto& [morph, count] : model.lexicon) {
    if (morph.empty()) throw DataError("lexicon contains an empty morph");
    sum += count;
  }
  if (sum != model.total_tokens) {
    throw DataError("lexicon counts sum to " + std::to_string(sum) + ", total_tokens is " +
                    std::to_string(model.total_tokens));
  }
  if (model.max_lexicon_size && lexicon_measure(model) > *model.max_lexicon_size) {
    throw DataError("lexicon exceeds its size cap");
  }
}

MorfModel train_baseline(const WordCounts& word_counts, const MorfessorOptions& options,
                         TrainingTrace* trace) {
  Trainer trainer(word_counts, options.alpha, CountWeighting::types, std::nullopt, trace);
  trainer.run(options.seed, options.epsilon, options.max_epochs);
  return trainer.model(MorfVariant::baseline);
}

MorfModel train_lmvr(const WordCounts& word_counts, const LmvrOptions& options,
                     TrainingTrace* trace) {
  Trainer trainer(word_counts, options.alpha, options.weighting, options.max_lexicon_size,
                  trace);
  trainer.run(options.seed, options.epsilon, options.max_epochs);
  return trainer.model(MorfVariant::lmvr);
}

double unseen_morph_cost(const MorfModel& model, std::string_view morph) {
  const double spelling = static_cast<double>(text::char_length(morph) + 1) *
                          char_code_length(model.alphabet.size());
  return model.alpha * spelling + std::log(static_cast<double>(model.total_tokens) + 1.0);
}

double morph_cost(const MorfModel& model, std::string_view morph) {
  auto it = model.lexicon.find(morph);
  if (it == model.lexicon.end() || it->second == 0) return unseen_morph_cost(model, morph);
  return std::log(static_cast<double>(model.total_tokens)) -
         std::log(static_cast<double>(it->second));
}

double segmentation_cost(const MorfModel& model, const std::vector<std::string>& morphs) {
  double c = 0;
  for (const auto& m : morphs) c += morph_cost(model, m);
  return c;
}

std::vector<std::string> viterbi_segment(const MorfModel& model, std::string_view word) {
  if (word.empty()) throw DataError("cannot segment an empty word");
  const auto cuts = char_boundaries(word);
  const std::size_t n = cuts.size() - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n + 1, inf);
  std::vector<std::size_t> back(n + 1, 0);
  best[0] = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double c =
          best[i] + morph_cost(model, word.substr(cuts[i], cuts[j] - cuts[i]));
      // Near-ties keep the earliest split point (longest final morph).
      if (c < best[j] - 1e-9) {
        best[j] = c;
        back[j] = i;
      }
    }
  }
  std::vector<std::string> morphs;
  for (std::size_t j = n; j > 0; j = back[j]) {
    morphs.emplace_back(word.substr(cuts[back[j]], cuts[j] - cuts[back[j]]));
  }
  std::reverse(morphs.begin(), morphs.end());
  return morphs;
}

std::vector<std::string> segment(const MorfModel& model, std::string_view word) {
  if (model.categories) {
    std::vector<std::string> out;
    for (auto& tm : flatcat_viterbi(model, word)) out.push_back(std::move(tm.morph));
    return out;
  }
  return viterbi_segment(model, word);
}

std::vector<std::vector<SegmentedWord>> segment_corpus(const MorfModel& model,
                                                       const std::vector<Sentence>& sentences) {
  std::unordered_map<std::string, std::vector<std::string>> cache;
  std::vector<std::vector<SegmentedWord>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<SegmentedWord> words;
    words.reserve(s.tokens.size());
    for (const auto& token : s.tokens) {
      auto it = cache.find(token);
      if (it == cache.end()) it = cache.emplace(token, segment(model, token)).first;
      SegmentedWord w{token, it->second, SegMode::surface};
      validate(w);
      words.push_back(std::move(w));
    }
    out.push_back(std::move(words));
  }
  return out;
}

}  // namespace polyseg
