#include "polyseg/flatcat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "polyseg/error.hpp"
#include "polyseg/text.hpp"

namespace polyseg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kStart = 0;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t row_of(std::size_t c) { return 1 + c; }

const CategoryModel& require_categories(const MorfModel& model) {
  if (!model.categories) throw DataError("model has no category parameters");
  return *model.categories;
}

using Emissions = std::array<double, kCategories>;

struct Lattice {
  std::vector<Emissions> alpha;
  std::vector<Emissions> beta;
  double log_z = kNegInf;
};

std::vector<Emissions> emissions_for(const MorfModel& model,
                                     const std::vector<std::string>& morphs) {
  std::vector<Emissions> out(morphs.size());
  for (std::size_t k = 0; k < morphs.size(); ++k) {
    for (std::size_t c = 0; c < kCategories; ++c) {
      out[k][c] = log_emission(model, morphs[k], static_cast<Category>(c));
    }
  }
  return out;
}

Lattice forward_backward(const CategoryModel& cm, const std::vector<Emissions>& em) {
  const std::size_t n = em.size();
  Lattice lat;
  lat.alpha.assign(n, Emissions{kNegInf, kNegInf, kNegInf, kNegInf});
  lat.beta.assign(n, Emissions{kNegInf, kNegInf, kNegInf, kNegInf});
  if (n == 0) return lat;
  const auto& tr = cm.log_transitions;
  for (std::size_t c = 0; c < kCategories; ++c) lat.alpha[0][c] = tr[kStart][c] + em[0][c];
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t c = 0; c < kCategories; ++c) {
      double acc = kNegInf;
      for (std::size_t p = 0; p < kCategories; ++p) {
        acc = log_add(acc, lat.alpha[k - 1][p] + tr[row_of(p)][c]);
      }
      lat.alpha[k][c] = acc + em[k][c];
    }
  }
  for (std::size_t c = 0; c < kCategories; ++c) {
    if (final_allowed(static_cast<Category>(c))) {
      lat.beta[n - 1][c] = 0;
      lat.log_z = log_add(lat.log_z, lat.alpha[n - 1][c]);
    }
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    for (std::size_t c = 0; c < kCategories; ++c) {
      double acc = kNegInf;
      for (std::size_t d = 0; d < kCategories; ++d) {
        acc = log_add(acc, tr[row_of(c)][d] + em[k + 1][d] + lat.beta[k + 1][d]);
      }
      lat.beta[k][c] = acc;
    }
  }
  return lat;
}

struct Observation {
  std::vector<std::string> morphs;
  double weight;
};

CategoryModel initial_parameters(const std::vector<Observation>& data,
                                 const MorfModel& baseline, const FlatcatOptions& options) {
  std::map<std::string, std::set<std::string>, std::less<>> left;
  std::map<std::string, std::set<std::string>, std::less<>> right;
  for (const auto& obs : data) {
    for (std::size_t k = 0; k < obs.morphs.size(); ++k) {
      left[obs.morphs[k]].insert(k == 0 ? "#" : obs.morphs[k - 1]);
      right[obs.morphs[k]].insert(k + 1 == obs.morphs.size() ? "#" : obs.morphs[k + 1]);
    }
  }

  CategoryModel cm;
  for (std::size_t r = 0; r <= kCategories; ++r) {
    std::size_t allowed = 0;
    for (std::size_t c = 0; c < kCategories; ++c) {
      if (transition_allowed(r, static_cast<Category>(c), options.stem_only)) ++allowed;
    }
    for (std::size_t c = 0; c < kCategories; ++c) {
      cm.log_transitions[r][c] =
          transition_allowed(r, static_cast<Category>(c), options.stem_only)
              ? -std::log(static_cast<double>(allowed))
              : kNegInf;
    }
  }

  Emissions mass{};
  std::map<std::string, Emissions, std::less<>> raw;
  for (const auto& [morph, count] : baseline.lexicon) {
    if (count == 0) continue;
    Emissions p{};
    if (options.stem_only) {
      p[static_cast<std::size_t>(Category::stm)] = 1.0;
    } else {
      p = initial_affinity(left[morph].size(), right[morph].size(), text::char_length(morph),
                           options);
    }
    Emissions e{};
    for (std::size_t c = 0; c < kCategories; ++c) {
      e[c] = static_cast<double>(count) * p[c];
      mass[c] += e[c];
    }
    raw.emplace(morph, e);
  }
  for (auto& [morph, e] : raw) {
    Emissions logs{};
    for (std::size_t c = 0; c < kCategories; ++c) {
      logs[c] = mass[c] > 0 && e[c] > 0 ? std::log(e[c] / mass[c]) : kNegInf;
    }
    cm.log_emissions.emplace(morph, logs);
  }
  return cm;
}

double data_log_likelihood(const MorfModel& model, const std::vector<Observation>& data) {
  double ll = 0;
  for (const auto& obs : data) ll += obs.weight * sequence_log_likelihood(model, obs.morphs);
  return ll;
}

// One EM step; rows or categories without expected mass keep their values.
void em_step(MorfModel& model, const std::vector<Observation>& data) {
  auto& cm = *model.categories;
  std::array<Emissions, kCategories + 1> trans{};
  std::map<std::string, Emissions, std::less<>> emit;
  for (const auto& obs : data) {
    const auto em = emissions_for(model, obs.morphs);
    const auto lat = forward_backward(cm, em);
    if (lat.log_z == kNegInf) {
      throw NumericError("analysis has zero probability under the category model");
    }
    const std::size_t n = obs.morphs.size();
    for (std::size_t k = 0; k < n; ++k) {
      auto& e = emit[obs.morphs[k]];
      for (std::size_t c = 0; c < kCategories; ++c) {
        const double post = std::exp(lat.alpha[k][c] + lat.beta[k][c] - lat.log_z);
        e[c] += obs.weight * post;
        if (k == 0) trans[kStart][c] += obs.weight * post;
      }
      if (k + 1 == n) continue;
      for (std::size_t p = 0; p < kCategories; ++p) {
        for (std::size_t c = 0; c < kCategories; ++c) {
          const double lp = lat.alpha[k][p] + cm.log_transitions[row_of(p)][c] + em[k + 1][c] +
                            lat.beta[k + 1][c] - lat.log_z;
          if (lp != kNegInf) trans[row_of(p)][c] += obs.weight * std::exp(lp);
        }
      }
    }
  }

  for (std::size_t r = 0; r <= kCategories; ++r) {
    double total = 0;
    for (double v : trans[r]) total += v;
    if (!(total > 0)) continue;
    for (std::size_t c = 0; c < kCategories; ++c) {
      cm.log_transitions[r][c] = trans[r][c] > 0 ? std::log(trans[r][c] / total) : kNegInf;
    }
  }

  Emissions mass{};
  for (const auto& [_, e] : emit) {
    for (std::size_t c = 0; c < kCategories; ++c) mass[c] += e[c];
  }
  for (auto& [morph, logs] : cm.log_emissions) {
    auto it = emit.find(morph);
    for (std::size_t c = 0; c < kCategories; ++c) {
      if (!(mass[c] > 0)) continue;
      const double v = it == emit.end() ? 0.0 : it->second[c];
      logs[c] = v > 0 ? std::log(v / mass[c]) : kNegInf;
    }
  }
}

}  // namespace

bool transition_allowed(std::size_t from_row, Category to, bool stem_only) {
  if (stem_only) return to == Category::stm && (from_row == kStart || from_row == row_of(1));
  switch (from_row) {
    case 0:
    case 1:  // PRE
      return to == Category::pre || to == Category::stm;
    case 2:  // STM
    case 3:  // SUF
      return true;
    case 4:  // NON
      return to != Category::suf;
    default:
      return false;
  }
}

bool final_allowed(Category c) { return c == Category::stm || c == Category::suf; }

std::array<double, kCategories> initial_affinity(std::size_t left_diversity,
                                                 std::size_t right_diversity,
                                                 std::size_t length,
                                                 const FlatcatOptions& options) {
  const double s = options.slope;
  const double pre = sigmoid(s * (static_cast<double>(right_diversity) - options.diversity_threshold));
  const double suf = sigmoid(s * (static_cast<double>(left_diversity) - options.diversity_threshold));
  const double stm = sigmoid(s * (static_cast<double>(length) - options.length_threshold));
  const double non = (1 - pre) * (1 - suf) * (1 - stm);
  const double norm = pre * pre + suf * suf + stm * stm;
  std::array<double, kCategories> p{};
  p[static_cast<std::size_t>(Category::pre)] = (1 - non) * pre * pre / norm;
  p[static_cast<std::size_t>(Category::stm)] = (1 - non) * stm * stm / norm;
  p[static_cast<std::size_t>(Category::suf)] = (1 - non) * suf * suf / norm;
  p[static_cast<std::size_t>(Category::non)] = non;
  return p;
}

double log_emission(const MorfModel& model, std::string_view morph, Category c) {
  const auto& cm = require_categories(model);
  auto it = cm.log_emissions.find(morph);
  if (it == cm.log_emissions.end()) return -unseen_morph_cost(model, morph);
  return it->second[static_cast<std::size_t>(c)];
}

double sequence_log_likelihood(const MorfModel& model, const std::vector<std::string>& morphs) {
  const auto& cm = require_categories(model);
  return forward_backward(cm, emissions_for(model, morphs)).log_z;
}

std::vector<std::array<double, kCategories>> category_posteriors(
    const MorfModel& model, const std::vector<std::string>& morphs) {
  const auto& cm = require_categories(model);
  const auto lat = forward_backward(cm, emissions_for(model, morphs));
  std::vector<std::array<double, kCategories>> out(morphs.size());
  for (std::size_t k = 0; k < morphs.size(); ++k) {
    for (std::size_t c = 0; c < kCategories; ++c) {
      out[k][c] = lat.log_z == kNegInf
                      ? 0.0
                      : std::exp(lat.alpha[k][c] + lat.beta[k][c] - lat.log_z);
    }
  }
  return out;
}

MorfModel train_flatcat(const WordCounts& word_counts, const MorfModel& baseline,
                        const FlatcatOptions& options, FlatcatTrace* trace) {
  if (baseline.lexicon.empty()) throw DataError("baseline model has an empty lexicon");
  std::vector<Observation> data;
  for (const auto& [word, count] : word_counts) {
    auto it = baseline.analyses.find(word);
    if (it == baseline.analyses.end()) {
      throw DataError("word '" + word + "' has no analysis in the baseline model");
    }
    const double weight =
        baseline.weighting == CountWeighting::types ? 1.0 : static_cast<double>(count);
    if (weight > 0) data.push_back(Observation{it->second, weight});
  }
  if (data.empty()) throw DataError("flatcat training needs at least one word");

  MorfModel model = baseline;
  model.variant = MorfVariant::flatcat;
  model.categories = initial_parameters(data, baseline, options);

  double ll = data_log_likelihood(model, data);
  if (trace != nullptr) trace->log_likelihoods.push_back(ll);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    em_step(model, data);
    const double next = data_log_likelihood(model, data);
    if (trace != nullptr) trace->log_likelihoods.push_back(next);
    const double gain = next - ll;
    ll = next;
    if (options.epsilon > 0 && gain < options.epsilon) break;
  }

  for (auto& [word, analysis] : model.analyses) {
    std::vector<std::string> morphs;
    for (auto& tm : flatcat_viterbi(model, word)) morphs.push_back(std::move(tm.morph));
    analysis = std::move(morphs);
  }
  return model;
}

std::vector<TaggedMorph> flatcat_viterbi(const MorfModel& model, std::string_view word) {
  const auto& cm = require_categories(model);
  if (word.empty()) throw DataError("cannot segment an empty word");
  std::vector<std::size_t> cuts{0};
  for (std::size_t i = 1; i < word.size(); ++i) {
    if ((static_cast<unsigned char>(word[i]) & 0xC0) != 0x80) cuts.push_back(i);
  }
  cuts.push_back(word.size());
  const std::size_t n = cuts.size() - 1;

  struct Cell {
    double score = kNegInf;
    std::size_t from = 0;
    std::size_t prev_row = 0;
  };
  std::vector<std::array<Cell, kCategories>> best(n + 1);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const std::string_view morph = word.substr(cuts[i], cuts[j] - cuts[i]);
      for (std::size_t c = 0; c < kCategories; ++c) {
        const double e = log_emission(model, morph, static_cast<Category>(c));
        if (e == kNegInf) continue;
        auto consider = [&](double prev, std::size_t row) {
          const double t = cm.log_transitions[row][c];
          if (prev == kNegInf || t == kNegInf) return;
          const double s = prev + t + e;
          if (s > best[j][c].score + 1e-9) best[j][c] = Cell{s, i, row};
        };
        if (i == 0) {
          consider(0.0, kStart);
        } else {
          for (std::size_t p = 0; p < kCategories; ++p) consider(best[i][p].score, row_of(p));
        }
      }
    }
  }

  double top = kNegInf;
  std::size_t top_c = 0;
  for (std::size_t c = 0; c < kCategories; ++c) {
    if (final_allowed(static_cast<Category>(c)) && best[n][c].score > top + 1e-9) {
      top = best[n][c].score;
      top_c = c;
    }
  }
  std::vector<TaggedMorph> out;
  if (top == kNegInf) {
    for (auto& m : viterbi_segment(model, word)) out.push_back({std::move(m), Category::stm});
    return out;
  }
  for (std::size_t j = n, c = top_c; j > 0;) {
    const Cell& cell = best[j][c];
    out.push_back({std::string(word.substr(cuts[cell.from], cuts[j] - cuts[cell.from])),
                   static_cast<Category>(c)});
    j = cell.from;
    c = cell.prev_row == kStart ? 0 : cell.prev_row - 1;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace polyseg
