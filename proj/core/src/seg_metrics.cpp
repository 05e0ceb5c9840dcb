#include "polyseg/seg_metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "polyseg/error.hpp"
#include "polyseg/text.hpp"

namespace polyseg {
namespace {

void check_aligned(const SegmentationDataset& pred, const SegmentationDataset& gold) {
  if (pred.entries.size() != gold.entries.size()) {
    throw AlignmentError("prediction has " + std::to_string(pred.entries.size()) +
                         " entries, gold has " + std::to_string(gold.entries.size()));
  }
  for (std::size_t i = 0; i < pred.entries.size(); ++i) {
    if (pred.entries[i].surface != gold.entries[i].surface) {
      throw AlignmentError("surface mismatch at index " + std::to_string(i) + ": '" +
                           pred.entries[i].surface + "' vs '" + gold.entries[i].surface + "'");
    }
  }
}

std::vector<std::size_t> boundaries(const SegmentedWord& w) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  for (std::size_t k = 0; k + 1 < w.morphs.size(); ++k) {
    pos += text::char_length(w.morphs[k]);
    out.push_back(pos);
  }
  return out;
}

double exact_accuracy(const SegmentationDataset& pred, const SegmentationDataset& gold) {
  if (gold.entries.empty()) return 1.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.entries.size(); ++i) {
    if (pred.entries[i].morphs == gold.entries[i].morphs) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.entries.size());
}

// Minimum-cost perfect assignment on a square matrix (Kuhn-Munkres with
// potentials). Returns the column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<std::int64_t>>& cost) {
  const std::size_t n = cost.size();
  constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      std::int64_t delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

double f1_score(double precision, double recall) {
  return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

SegScore boundary_f1(const SegmentationDataset& pred, const SegmentationDataset& gold) {
  if (pred.mode != SegMode::surface || gold.mode != SegMode::surface) {
    throw UnsupportedModeError("boundary F1 needs surface-mode segmentations");
  }
  check_aligned(pred, gold);
  std::uint64_t hits = 0, n_pred = 0, n_gold = 0;
  for (std::size_t i = 0; i < gold.entries.size(); ++i) {
    const auto p = boundaries(pred.entries[i]);
    const auto g = boundaries(gold.entries[i]);
    n_pred += p.size();
    n_gold += g.size();
    std::vector<std::size_t> common;
    std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
    hits += common.size();
  }
  SegScore s;
  s.precision = n_pred == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(n_pred);
  s.recall = n_gold == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(n_gold);
  s.f1 = f1_score(s.precision, s.recall);
  s.accuracy = exact_accuracy(pred, gold);
  return s;
}

Matching max_weight_matching(const std::vector<std::vector<std::uint64_t>>& weights) {
  const std::size_t rows = weights.size();
  const std::size_t cols = rows == 0 ? 0 : weights[0].size();
  Matching result;
  result.row_to_col.assign(rows, SIZE_MAX);
  if (rows == 0 || cols == 0) return result;

  // Solve each connected component of the positive-weight graph separately.
  DisjointSets sets(rows + cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (weights[r].size() != cols) throw DataError("ragged weight table");
    for (std::size_t c = 0; c < cols; ++c) {
      if (weights[r][c] > 0) sets.unite(r, rows + c);
    }
  }
  std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> comps;
  for (std::size_t r = 0; r < rows; ++r) comps[sets.find(r)].first.push_back(r);
  for (std::size_t c = 0; c < cols; ++c) comps[sets.find(rows + c)].second.push_back(c);

  for (const auto& [_, comp] : comps) {
    const auto& rs = comp.first;
    const auto& cs = comp.second;
    if (rs.empty() || cs.empty()) continue;
    const std::size_t n = std::max(rs.size(), cs.size());
    std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < rs.size(); ++i) {
      for (std::size_t j = 0; j < cs.size(); ++j) {
        cost[i][j] = -static_cast<std::int64_t>(weights[rs[i]][cs[j]]);
      }
    }
    const auto assign = hungarian(cost);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::size_t j = assign[i];
      if (j < cs.size() && weights[rs[i]][cs[j]] > 0) {
        result.row_to_col[rs[i]] = cs[j];
        result.weight += weights[rs[i]][cs[j]];
      }
    }
  }
  return result;
}

SegScore emma_f1(const SegmentationDataset& pred, const SegmentationDataset& gold) {
  check_aligned(pred, gold);
  std::map<std::string, std::size_t> pred_ids, gold_ids;
  std::uint64_t pred_tokens = 0, gold_tokens = 0;
  for (std::size_t i = 0; i < gold.entries.size(); ++i) {
    for (const auto& m : pred.entries[i].morphs) pred_ids.emplace(m, pred_ids.size());
    for (const auto& m : gold.entries[i].morphs) gold_ids.emplace(m, gold_ids.size());
    pred_tokens += pred.entries[i].morphs.size();
    gold_tokens += gold.entries[i].morphs.size();
  }
  std::vector<std::vector<std::uint64_t>> weights(pred_ids.size(),
                                                  std::vector<std::uint64_t>(gold_ids.size(), 0));
  for (std::size_t i = 0; i < gold.entries.size(); ++i) {
    std::map<std::size_t, std::uint64_t> pc, gc;
    for (const auto& m : pred.entries[i].morphs) ++pc[pred_ids.at(m)];
    for (const auto& m : gold.entries[i].morphs) ++gc[gold_ids.at(m)];
    for (const auto& [p, np] : pc) {
      for (const auto& [g, ng] : gc) weights[p][g] += std::min(np, ng);
    }
  }
  const auto matching = max_weight_matching(weights);
  SegScore s;
  const auto matched = static_cast<double>(matching.weight);
  s.precision = pred_tokens == 0 ? 1.0 : matched / static_cast<double>(pred_tokens);
  s.recall = gold_tokens == 0 ? 1.0 : matched / static_cast<double>(gold_tokens);
  s.f1 = f1_score(s.precision, s.recall);
  s.accuracy = exact_accuracy(pred, gold);
  return s;
}

}  // namespace polyseg
