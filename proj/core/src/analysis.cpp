#include "polyseg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "polyseg/error.hpp"
#include "polyseg/report.hpp"
#include "polyseg/text.hpp"

namespace polyseg {

std::vector<RichnessRecord> richness_table(const MorfModel& probe,
                                           const std::vector<Sentence>& sentences,
                                           const std::vector<double>& scores) {
  if (scores.size() != sentences.size()) {
    throw AlignmentError(std::to_string(sentences.size()) + " sentences but " +
                         std::to_string(scores.size()) + " scores");
  }
  const auto segmented = segment_corpus(probe, sentences);
  std::vector<RichnessRecord> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < segmented.size(); ++i) {
    std::size_t morphs = 0;
    for (const auto& w : segmented[i]) morphs += w.morphs.size();
    const auto tokens = static_cast<double>(segmented[i].size());
    out.push_back({i, tokens > 0 ? static_cast<double>(morphs) / tokens : 0.0, scores[i]});
  }
  std::stable_sort(out.begin(), out.end(), [](const RichnessRecord& a, const RichnessRecord& b) {
    return a.richness < b.richness;
  });
  return out;
}

std::vector<RichnessBin> bin_richness(const std::vector<RichnessRecord>& records,
                                      std::size_t bins) {
  if (bins == 0) throw ConfigError("bin count must be positive");
  std::vector<RichnessBin> out(bins);
  if (records.empty()) {
    for (std::size_t b = 0; b < bins; ++b) {
      out[b].bin = b;
      out[b].mean_score = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
  }
  double lo = records.front().richness, hi = lo;
  for (const auto& r : records) {
    lo = std::min(lo, r.richness);
    hi = std::max(hi, r.richness);
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> sums(bins, 0.0);
  for (const auto& r : records) {
    std::size_t b = 0;
    if (width > 0) {
      b = std::min(bins - 1, static_cast<std::size_t>((r.richness - lo) / width));
    }
    ++out[b].count;
    sums[b] += r.score;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].bin = b;
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    out[b].mean_score = out[b].count > 0 ? sums[b] / static_cast<double>(out[b].count)
                                         : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

UnkReport unk_report(std::string system, const std::vector<Sentence>& segmented,
                     const std::set<std::string>& vocabulary) {
  if (vocabulary.empty()) throw DataError("MT vocabulary is empty");
  UnkReport rep;
  rep.system = std::move(system);
  for (const auto& s : segmented) {
    for (const auto& piece : s.tokens) {
      ++rep.total;
      if (!vocabulary.contains(piece)) ++rep.unk;
    }
  }
  rep.rate = rep.total > 0 ? static_cast<double>(rep.unk) / static_cast<double>(rep.total) : 0.0;
  return rep;
}

std::set<std::string> read_vocabulary(std::istream& in) {
  std::set<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Accept "piece<TAB>count" as well as bare pieces.
    const auto tab = line.find('\t');
    if (tab != std::string::npos) line.resize(tab);
    if (!line.empty()) vocab.insert(line);
  }
  return vocab;
}

void write_richness_csv(std::ostream& out, const std::vector<RichnessRecord>& records, char sep) {
  out << "idx" << sep << "richness" << sep << "score\n";
  for (const auto& r : records) {
    out << r.index << sep << report::format_fixed(r.richness, 4) << sep
        << report::format_fixed(r.score, 4) << '\n';
  }
}

void write_bins_csv(std::ostream& out, const std::vector<RichnessBin>& bins, char sep) {
  out << "bin" << sep << "lo" << sep << "hi" << sep << "count" << sep << "mean_score\n";
  for (const auto& b : bins) {
    out << b.bin << sep << report::format_fixed(b.lo, 4) << sep << report::format_fixed(b.hi, 4)
        << sep << b.count << sep
        << (std::isnan(b.mean_score) ? std::string("-") : report::format_fixed(b.mean_score, 4))
        << '\n';
  }
}

void write_unk_csv(std::ostream& out, const std::vector<UnkReport>& reports, char sep) {
  out << "system" << sep << "total" << sep << "unk" << sep << "rate\n";
  for (const auto& r : reports) {
    out << r.system << sep << r.total << sep << r.unk << sep
        << report::format_ratio(r.unk, r.total, 4) << '\n';
  }
}

}  // namespace polyseg
