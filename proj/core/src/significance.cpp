#include "polyseg/significance.hpp"

#include <cmath>
#include <random>

#include "detail/random.hpp"
#include "polyseg/error.hpp"

namespace polyseg {
namespace {

constexpr double kTieSlack = 1e-9;

template <typename Stats, typename Score>
SignifResult run_test(const std::vector<Stats>& a, const std::vector<Stats>& b, Score score,
                      const SignifOptions& options) {
  const std::size_t n = a.size();
  Stats total_a{}, total_b{};
  for (std::size_t i = 0; i < n; ++i) {
    total_a += a[i];
    total_b += b[i];
  }
  SignifResult res;
  res.score_a = score(total_a);
  res.score_b = score(total_b);
  res.delta = res.score_a - res.score_b;
  const double observed = std::abs(res.delta);

  // Delta after swapping the sentences whose bit is set.
  auto swapped_delta = [&](auto&& bit) {
    Stats sa = total_a, sb = total_b;
    for (std::size_t i = 0; i < n; ++i) {
      if (bit(i)) {
        sa -= a[i];
        sa += b[i];
        sb -= b[i];
        sb += a[i];
      }
    }
    return std::abs(score(sa) - score(sb));
  };

  std::uint64_t extreme = 0;
  if (options.enumerate_small && n < 63 && (std::uint64_t{1} << n) <= options.trials) {
    const std::uint64_t patterns = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      if (swapped_delta([&](std::size_t i) { return (mask >> i) & 1U; }) >= observed - kTieSlack) {
        ++extreme;
      }
    }
    res.exact = true;
    res.trials = static_cast<std::size_t>(patterns);
    res.p_value = static_cast<double>(extreme) / static_cast<double>(patterns);
  } else {
    std::vector<std::uint64_t> bits((n + 63) / 64);
    for (std::size_t t = 0; t < options.trials; ++t) {
      std::mt19937_64 rng(detail::mix_seed(options.seed, t));
      for (auto& word : bits) word = rng();
      if (swapped_delta([&](std::size_t i) { return (bits[i / 64] >> (i % 64)) & 1U; }) >=
          observed - kTieSlack) {
        ++extreme;
      }
    }
    res.trials = options.trials;
    res.p_value = static_cast<double>(extreme + 1) / static_cast<double>(options.trials + 1);
  }
  res.significant = res.p_value <= options.alpha;
  return res;
}

}  // namespace

SignifResult paired_randomization_test(MtMetric metric, const std::vector<std::string>& sys_a,
                                       const std::vector<std::string>& sys_b,
                                       const std::vector<std::string>& refs,
                                       const SignifOptions& options) {
  if (sys_a.size() != refs.size() || sys_b.size() != refs.size()) {
    throw AlignmentError("system A has " + std::to_string(sys_a.size()) + " lines, system B " +
                         std::to_string(sys_b.size()) + ", reference " +
                         std::to_string(refs.size()));
  }
  if (options.trials == 0) throw ConfigError("trials must be positive");
  if (metric == MtMetric::bleu) {
    std::vector<BleuStats> a, b;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      a.push_back(bleu_stats(sys_a[i], refs[i]));
      b.push_back(bleu_stats(sys_b[i], refs[i]));
    }
    return run_test(a, b, [](const BleuStats& s) { return bleu_from_stats(s).score; }, options);
  }
  std::vector<ChrfStats> a, b;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    a.push_back(chrf_stats(sys_a[i], refs[i]));
    b.push_back(chrf_stats(sys_b[i], refs[i]));
  }
  return run_test(a, b, [](const ChrfStats& s) { return chrf_from_stats(s); }, options);
}

}  // namespace polyseg
