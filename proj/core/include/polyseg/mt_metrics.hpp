#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polyseg {

enum class MtMetric { bleu, chrf };
std::string_view to_string(MtMetric m);
MtMetric parse_mt_metric(std::string_view name);
std::string_view signature(MtMetric m);

// mteval-v13a tokenization as used by WMT.
std::string tokenize_13a(std::string_view line);

inline constexpr std::size_t kBleuOrder = 4;
inline constexpr std::size_t kChrfOrder = 6;

struct BleuStats {
  std::uint64_t sys_len = 0;
  std::uint64_t ref_len = 0;
  std::array<std::uint64_t, kBleuOrder> correct{};
  std::array<std::uint64_t, kBleuOrder> total{};

  BleuStats& operator+=(const BleuStats& o);
  BleuStats& operator-=(const BleuStats& o);
};

struct BleuResult {
  double score = 0;                        // 0..100
  std::array<double, kBleuOrder> precisions{};  // percentages, smoothed
  double brevity_penalty = 0;
  std::uint64_t sys_len = 0;
  std::uint64_t ref_len = 0;
};

BleuStats bleu_stats(std::string_view hyp, std::string_view ref);
// Exponential smoothing of zero precisions. Without effective order a
// missing higher order n-gram count yields 0.
BleuResult bleu_from_stats(const BleuStats& stats, bool effective_order = false);

struct ChrfStats {
  std::array<std::uint64_t, kChrfOrder> hyp{};
  std::array<std::uint64_t, kChrfOrder> ref{};
  std::array<std::uint64_t, kChrfOrder> match{};

  ChrfStats& operator+=(const ChrfStats& o);
  ChrfStats& operator-=(const ChrfStats& o);
};

ChrfStats chrf_stats(std::string_view hyp, std::string_view ref);
double chrf_from_stats(const ChrfStats& stats, double beta = 2.0);  // 0..100

struct ScoreReport {
  std::string metric;
  std::string signature;
  double score = 0;
  std::vector<double> sentence_scores;
  std::optional<double> p_value;
};

// Lines must be aligned; an AlignmentError is raised otherwise.
ScoreReport corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs);
ScoreReport corpus_chrf(const std::vector<std::string>& hyps, const std::vector<std::string>& refs);
ScoreReport corpus_score(MtMetric metric, const std::vector<std::string>& hyps,
                         const std::vector<std::string>& refs);

double sentence_bleu(std::string_view hyp, std::string_view ref);
double sentence_chrf(std::string_view hyp, std::string_view ref);

}  // namespace polyseg
