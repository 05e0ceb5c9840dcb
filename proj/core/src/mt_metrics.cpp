#include "polyseg/mt_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "polyseg/error.hpp"
#include "polyseg/text.hpp"

namespace polyseg {
namespace {

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_13a_symbol(char32_t c) {
  return (c >= U'{' && c <= U'~') || (c >= U'[' && c <= U'`') || (c >= U' ' && c <= U'&') ||
         (c >= U'(' && c <= U'+') || (c >= U':' && c <= U'@') || c == U'/';
}

void replace_all(std::u32string& s, std::u32string_view from, std::u32string_view to) {
  std::u32string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = s.find(from, pos);
    if (hit == std::u32string::npos) break;
    out.append(s, pos, hit - pos);
    out.append(to);
    pos = hit + from.size();
  }
  out.append(s, pos, std::u32string::npos);
  s = std::move(out);
}

// Left-to-right, non-overlapping replacement of two-character matches,
// mirroring a regex substitution of the form (x)(y).
template <typename Match, typename Emit>
std::u32string rewrite_pairs(const std::u32string& s, Match match, Emit emit) {
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && match(s[i], s[i + 1])) {
      emit(out, s[i], s[i + 1]);
      i += 2;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

std::u32string strip(const std::u32string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && text::is_space(s[b])) ++b;
  while (e > b && text::is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string_view rstrip(std::string_view s) {
  const auto cps = text::decode(s);
  std::size_t e = cps.size();
  while (e > 0 && text::is_space(cps[e - 1])) --e;
  // Byte length of the kept prefix.
  std::size_t bytes = 0;
  for (std::size_t k = 0; k < e; ++k) bytes += text::encode(cps[k]).size();
  return s.substr(0, bytes);
}

using NgramCounts = std::unordered_map<std::string, std::uint64_t>;

std::array<NgramCounts, kBleuOrder> extract_ngrams(const std::vector<std::string>& tokens) {
  std::array<NgramCounts, kBleuOrder> out;
  for (std::size_t n = 1; n <= kBleuOrder; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string key = tokens[i];
      for (std::size_t k = 1; k < n; ++k) {
        key += ' ';
        key += tokens[i + k];
      }
      ++out[n - 1][key];
    }
  }
  return out;
}

std::u32string strip_whitespace(std::string_view s) {
  std::u32string out;
  for (char32_t c : text::decode(s)) {
    if (!text::is_space(c)) out.push_back(c);
  }
  return out;
}

std::unordered_map<std::u32string, std::uint64_t> char_ngrams(const std::u32string& s,
                                                              std::size_t n) {
  std::unordered_map<std::u32string, std::uint64_t> out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++out[s.substr(i, n)];
  return out;
}

void check_lengths(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  if (hyps.size() != refs.size()) {
    throw AlignmentError("hypothesis has " + std::to_string(hyps.size()) +
                         " lines, reference has " + std::to_string(refs.size()));
  }
}

}  // namespace

std::string_view to_string(MtMetric m) { return m == MtMetric::bleu ? "bleu" : "chrf"; }

MtMetric parse_mt_metric(std::string_view name) {
  if (name == "bleu") return MtMetric::bleu;
  if (name == "chrf") return MtMetric::chrf;
  throw ConfigError("unknown MT metric '" + std::string(name) + "'");
}

std::string_view signature(MtMetric m) {
  return m == MtMetric::bleu ? "BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a"
                             : "chrF2+numchars.6+space.false";
}

std::string tokenize_13a(std::string_view line) {
  std::u32string s = text::decode(line);
  replace_all(s, U"<skipped>", U"");
  replace_all(s, U"-\n", U"");
  replace_all(s, U"\n", U" ");
  replace_all(s, U"&quot;", U"\"");
  replace_all(s, U"&amp;", U"&");
  replace_all(s, U"&lt;", U"<");
  replace_all(s, U"&gt;", U">");
  s = U" " + s + U" ";

  std::u32string t;
  for (char32_t c : s) {
    if (is_13a_symbol(c)) {
      t.push_back(U' ');
      t.push_back(c);
      t.push_back(U' ');
    } else {
      t.push_back(c);
    }
  }
  auto is_period_comma = [](char32_t c) { return c == U'.' || c == U','; };
  t = rewrite_pairs(
      t, [&](char32_t a, char32_t b) { return !is_digit(a) && is_period_comma(b); },
      [](std::u32string& o, char32_t a, char32_t b) { o += a; o += U' '; o += b; o += U' '; });
  t = rewrite_pairs(
      t, [&](char32_t a, char32_t b) { return is_period_comma(a) && !is_digit(b); },
      [](std::u32string& o, char32_t a, char32_t b) { o += U' '; o += a; o += U' '; o += b; });
  t = rewrite_pairs(
      t, [](char32_t a, char32_t b) { return is_digit(a) && b == U'-'; },
      [](std::u32string& o, char32_t a, char32_t b) { o += a; o += U' '; o += b; o += U' '; });

  std::u32string collapsed;
  bool in_space = false;
  for (char32_t c : t) {
    if (text::is_space(c)) {
      if (!in_space) collapsed.push_back(U' ');
      in_space = true;
    } else {
      collapsed.push_back(c);
      in_space = false;
    }
  }
  return text::encode(strip(collapsed));
}

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  sys_len += o.sys_len;
  ref_len += o.ref_len;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    correct[n] += o.correct[n];
    total[n] += o.total[n];
  }
  return *this;
}

BleuStats& BleuStats::operator-=(const BleuStats& o) {
  sys_len -= o.sys_len;
  ref_len -= o.ref_len;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    correct[n] -= o.correct[n];
    total[n] -= o.total[n];
  }
  return *this;
}

BleuStats bleu_stats(std::string_view hyp, std::string_view ref) {
  const auto h = text::split_whitespace(tokenize_13a(rstrip(hyp)));
  const auto r = text::split_whitespace(tokenize_13a(rstrip(ref)));
  BleuStats st;
  st.sys_len = h.size();
  st.ref_len = r.size();
  const auto hn = extract_ngrams(h);
  const auto rn = extract_ngrams(r);
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    for (const auto& [gram, count] : hn[n]) {
      st.total[n] += count;
      auto it = rn[n].find(gram);
      if (it != rn[n].end()) st.correct[n] += std::min(count, it->second);
    }
  }
  return st;
}

BleuResult bleu_from_stats(const BleuStats& stats, bool effective_order) {
  BleuResult res;
  res.sys_len = stats.sys_len;
  res.ref_len = stats.ref_len;
  std::array<double, kBleuOrder> frac{};
  std::size_t order = kBleuOrder;
  double smooth = 1.0;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    if (stats.total[n] == 0) break;
    if (effective_order) order = n + 1;
    const auto total = static_cast<double>(stats.total[n]);
    if (stats.correct[n] == 0) {
      smooth *= 2;
      frac[n] = 1.0 / (smooth * total);
    } else {
      frac[n] = static_cast<double>(stats.correct[n]) / total;
    }
    res.precisions[n] = 100.0 * frac[n];
  }
  if (stats.sys_len < stats.ref_len) {
    res.brevity_penalty =
        stats.sys_len > 0 ? std::exp(1.0 - static_cast<double>(stats.ref_len) /
                                               static_cast<double>(stats.sys_len))
                          : 0.0;
  } else {
    res.brevity_penalty = 1.0;
  }
  double log_sum = 0;
  for (std::size_t n = 0; n < order; ++n) {
    if (frac[n] == 0) {
      // An order with no n-grams at all zeroes the geometric mean.
      res.score = 0;
      return res;
    }
    log_sum += std::log(frac[n]);
  }
  res.score = 100.0 * res.brevity_penalty * std::exp(log_sum / static_cast<double>(order));
  return res;
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& o) {
  for (std::size_t n = 0; n < kChrfOrder; ++n) {
    hyp[n] += o.hyp[n];
    ref[n] += o.ref[n];
    match[n] += o.match[n];
  }
  return *this;
}

ChrfStats& ChrfStats::operator-=(const ChrfStats& o) {
  for (std::size_t n = 0; n < kChrfOrder; ++n) {
    hyp[n] -= o.hyp[n];
    ref[n] -= o.ref[n];
    match[n] -= o.match[n];
  }
  return *this;
}

ChrfStats chrf_stats(std::string_view hyp, std::string_view ref) {
  const auto h = strip_whitespace(hyp);
  const auto r = strip_whitespace(ref);
  ChrfStats st;
  for (std::size_t n = 1; n <= kChrfOrder; ++n) {
    const auto hn = char_ngrams(h, n);
    const auto rn = char_ngrams(r, n);
    st.hyp[n - 1] = h.size() >= n ? h.size() - n + 1 : 0;
    st.ref[n - 1] = r.size() >= n ? r.size() - n + 1 : 0;
    for (const auto& [gram, count] : hn) {
      auto it = rn.find(gram);
      if (it != rn.end()) st.match[n - 1] += std::min(count, it->second);
    }
  }
  return st;
}

double chrf_from_stats(const ChrfStats& stats, double beta) {
  double precision = 0, recall = 0;
  std::size_t orders = 0;
  for (std::size_t n = 0; n < kChrfOrder; ++n) {
    if (stats.hyp[n] > 0 && stats.ref[n] > 0) {
      precision += static_cast<double>(stats.match[n]) / static_cast<double>(stats.hyp[n]);
      recall += static_cast<double>(stats.match[n]) / static_cast<double>(stats.ref[n]);
      ++orders;
    }
  }
  if (orders == 0) return 0.0;
  precision /= static_cast<double>(orders);
  recall /= static_cast<double>(orders);
  if (precision + recall == 0) return 0.0;
  const double b2 = beta * beta;
  return 100.0 * (1 + b2) * precision * recall / (b2 * precision + recall);
}

double sentence_bleu(std::string_view hyp, std::string_view ref) {
  return bleu_from_stats(bleu_stats(hyp, ref), true).score;
}

double sentence_chrf(std::string_view hyp, std::string_view ref) {
  return chrf_from_stats(chrf_stats(hyp, ref));
}

ScoreReport corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  check_lengths(hyps, refs);
  ScoreReport rep;
  rep.metric = "bleu";
  rep.signature = std::string(signature(MtMetric::bleu));
  BleuStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto st = bleu_stats(hyps[i], refs[i]);
    total += st;
    rep.sentence_scores.push_back(bleu_from_stats(st, true).score);
  }
  rep.score = bleu_from_stats(total).score;
  return rep;
}

ScoreReport corpus_chrf(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  check_lengths(hyps, refs);
  ScoreReport rep;
  rep.metric = "chrf";
  rep.signature = std::string(signature(MtMetric::chrf));
  ChrfStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto st = chrf_stats(hyps[i], refs[i]);
    total += st;
    rep.sentence_scores.push_back(chrf_from_stats(st));
  }
  rep.score = chrf_from_stats(total);
  return rep;
}

ScoreReport corpus_score(MtMetric metric, const std::vector<std::string>& hyps,
                         const std::vector<std::string>& refs) {
  return metric == MtMetric::bleu ? corpus_bleu(hyps, refs) : corpus_chrf(hyps, refs);
}

}  // namespace polyseg
