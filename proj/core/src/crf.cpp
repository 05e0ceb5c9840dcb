#include "polyseg/crf.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "polyseg/error.hpp"
#include "polyseg/text.hpp"

namespace polyseg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kNoSlot = SIZE_MAX;

// Parameter slot of each allowed transition, kNoSlot when forbidden.
constexpr std::array<std::array<std::size_t, kTags>, kTags> kSlots = {{
    // to:  B        E        M        S
    {kNoSlot, 0, 1, kNoSlot},        // from B
    {2, kNoSlot, kNoSlot, 3},        // from E
    {kNoSlot, 4, 5, kNoSlot},        // from M
    {6, kNoSlot, kNoSlot, 7},        // from S
}};

std::size_t idx(Tag t) { return static_cast<std::size_t>(t); }

double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double acc = 0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

using Row = std::array<double, kTags>;

std::vector<Row> emission_scores(const CrfModel& model,
                                 const std::vector<std::vector<std::size_t>>& feats) {
  std::vector<Row> out(feats.size(), Row{});
  for (std::size_t i = 0; i < feats.size(); ++i) {
    for (std::size_t f : feats[i]) {
      for (std::size_t t = 0; t < kTags; ++t) out[i][t] += model.weight(f, static_cast<Tag>(t));
    }
  }
  return out;
}

std::array<Row, kTags> transition_matrix(const CrfModel& model) {
  std::array<Row, kTags> m{};
  for (std::size_t a = 0; a < kTags; ++a) {
    for (std::size_t b = 0; b < kTags; ++b) {
      m[a][b] = model.transition(static_cast<Tag>(a), static_cast<Tag>(b));
    }
  }
  return m;
}

struct Lattice {
  std::vector<Row> alpha;
  std::vector<Row> beta;
  double log_z = kNegInf;
};

Lattice forward_backward(const std::vector<Row>& em, const std::array<Row, kTags>& tr) {
  const std::size_t n = em.size();
  Lattice lat;
  lat.alpha.assign(n, Row{kNegInf, kNegInf, kNegInf, kNegInf});
  lat.beta.assign(n, Row{kNegInf, kNegInf, kNegInf, kNegInf});
  if (n == 0) {
    lat.log_z = 0;
    return lat;
  }
  for (std::size_t t = 0; t < kTags; ++t) {
    if (tag_start_allowed(static_cast<Tag>(t))) lat.alpha[0][t] = em[0][t];
  }
  Row buf{};
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t t = 0; t < kTags; ++t) {
      for (std::size_t p = 0; p < kTags; ++p) buf[p] = lat.alpha[i - 1][p] + tr[p][t];
      lat.alpha[i][t] = log_sum_exp(buf) + em[i][t];
    }
  }
  for (std::size_t t = 0; t < kTags; ++t) {
    if (tag_end_allowed(static_cast<Tag>(t))) lat.beta[n - 1][t] = 0;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    for (std::size_t t = 0; t < kTags; ++t) {
      for (std::size_t u = 0; u < kTags; ++u) buf[u] = tr[t][u] + em[i + 1][u] + lat.beta[i + 1][u];
      lat.beta[i][t] = log_sum_exp(buf);
    }
  }
  for (std::size_t t = 0; t < kTags; ++t) buf[t] = lat.alpha[n - 1][t] + lat.beta[n - 1][t];
  lat.log_z = log_sum_exp(buf);
  return lat;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct Objective {
  const std::vector<BmesSequence>* data;
  CrfModel* model;

  // Negated log-likelihood, for minimization.
  double operator()(std::span<const double> x, std::vector<double>& grad) const {
    model->set_parameters(x);
    auto ll = log_likelihood_and_gradient(*model, *data);
    if (!std::isfinite(ll.value)) throw NumericError("CRF objective is not finite");
    grad = std::move(ll.gradient);
    for (double& g : grad) g = -g;
    return -ll.value;
  }
};

}  // namespace

char tag_char(Tag t) {
  static constexpr char names[] = {'B', 'E', 'M', 'S'};
  return names[idx(t)];
}

Tag parse_tag(char c) {
  switch (c) {
    case 'B': return Tag::B;
    case 'E': return Tag::E;
    case 'M': return Tag::M;
    case 'S': return Tag::S;
    default: throw DataError(std::string("unknown tag '") + c + "'");
  }
}

bool tag_transition_allowed(Tag from, Tag to) { return kSlots[idx(from)][idx(to)] != kNoSlot; }
bool tag_start_allowed(Tag t) { return t == Tag::B || t == Tag::S; }
bool tag_end_allowed(Tag t) { return t == Tag::E || t == Tag::S; }

bool is_well_formed(std::span<const Tag> labels) {
  if (labels.empty()) return false;
  if (!tag_start_allowed(labels.front()) || !tag_end_allowed(labels.back())) return false;
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (!tag_transition_allowed(labels[i - 1], labels[i])) return false;
  }
  return true;
}

BmesSequence to_bmes(const SegmentedWord& word) {
  if (word.mode != SegMode::surface) {
    throw UnsupportedModeError("CRF segmentation supports surface mode only");
  }
  validate(word);
  BmesSequence seq;
  for (const auto& morph : word.morphs) {
    auto chars = text::split_chars(morph);
    for (std::size_t k = 0; k < chars.size(); ++k) {
      Tag t = Tag::M;
      if (chars.size() == 1) {
        t = Tag::S;
      } else if (k == 0) {
        t = Tag::B;
      } else if (k + 1 == chars.size()) {
        t = Tag::E;
      }
      seq.labels.push_back(t);
      seq.chars.push_back(std::move(chars[k]));
    }
  }
  return seq;
}

std::vector<std::string> from_bmes(const BmesSequence& seq) {
  if (seq.chars.size() != seq.labels.size()) {
    throw DataError("BMES sequence has mismatched lengths");
  }
  std::vector<std::string> morphs;
  std::string cur;
  for (std::size_t i = 0; i < seq.chars.size(); ++i) {
    cur += seq.chars[i];
    if (seq.labels[i] == Tag::E || seq.labels[i] == Tag::S) {
      morphs.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) morphs.push_back(std::move(cur));
  return morphs;
}

std::vector<std::string> extract_features(std::span<const std::string> chars, std::size_t i,
                                          std::size_t delta) {
  if (i >= chars.size()) throw DataError("feature position out of range");
  const auto n = static_cast<std::ptrdiff_t>(chars.size());
  const auto d = static_cast<std::ptrdiff_t>(delta);
  const auto pos = static_cast<std::ptrdiff_t>(i);
  auto symbol = [&](std::ptrdiff_t p) -> std::string_view {
    if (p < 0) return kLeftPad;
    if (p >= n) return kRightPad;
    return chars[static_cast<std::size_t>(p)];
  };
  std::vector<std::string> out;
  for (std::ptrdiff_t len = 1; len <= d; ++len) {
    for (std::ptrdiff_t off = -d; off + len - 1 <= d; ++off) {
      std::string key = std::to_string(off) + ":";
      for (std::ptrdiff_t k = 0; k < len; ++k) key += symbol(pos + off + k);
      out.push_back(std::move(key));
    }
  }
  return out;
}

CrfModel::CrfModel(std::size_t delta, double l2) : delta_(delta), l2_(l2) {
  if (delta == 0) throw ConfigError("CRF window radius must be positive");
  if (!(l2 >= 0) || !std::isfinite(l2)) throw ConfigError("l2 must be a non-negative number");
}

std::size_t CrfModel::intern(const std::string& feature) {
  auto [it, inserted] = index_.emplace(feature, names_.size());
  if (inserted) {
    names_.push_back(feature);
    emission_.resize(emission_.size() + kTags, 0.0);
  }
  return it->second;
}

std::size_t CrfModel::find(std::string_view feature) const {
  auto it = index_.find(std::string(feature));
  return it == index_.end() ? SIZE_MAX : it->second;
}

double CrfModel::weight(std::size_t feature, Tag t) const { return emission_[feature * kTags + idx(t)]; }

void CrfModel::set_weight(std::size_t feature, Tag t, double w) {
  emission_[feature * kTags + idx(t)] = w;
}

double CrfModel::transition(Tag from, Tag to) const {
  const std::size_t slot = kSlots[idx(from)][idx(to)];
  return slot == kNoSlot ? kNegInf : transitions_[slot];
}

void CrfModel::set_transition(Tag from, Tag to, double w) {
  const std::size_t slot = kSlots[idx(from)][idx(to)];
  if (slot == kNoSlot) {
    throw DataError(std::string("transition ") + tag_char(from) + "->" + tag_char(to) +
                    " is forbidden");
  }
  transitions_[slot] = w;
}

std::vector<double> CrfModel::parameters() const {
  std::vector<double> out(emission_);
  out.insert(out.end(), transitions_.begin(), transitions_.end());
  return out;
}

void CrfModel::set_parameters(std::span<const double> params) {
  if (params.size() != num_parameters()) throw DataError("parameter vector has the wrong size");
  std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(emission_.size()),
            emission_.begin());
  std::copy(params.end() - kAllowedTransitions, params.end(), transitions_.begin());
}

std::vector<std::vector<std::size_t>> CrfModel::featurize(std::span<const std::string> chars) const {
  std::vector<std::vector<std::size_t>> out(chars.size());
  for (std::size_t i = 0; i < chars.size(); ++i) {
    for (const auto& f : extract_features(chars, i, delta_)) {
      auto it = index_.find(f);
      if (it != index_.end()) out[i].push_back(it->second);
    }
  }
  return out;
}

double sequence_score(const CrfModel& model, std::span<const std::string> chars,
                      std::span<const Tag> labels) {
  if (chars.size() != labels.size()) throw DataError("labels and characters differ in length");
  if (!is_well_formed(labels)) return kNegInf;
  const auto em = emission_scores(model, model.featurize(chars));
  double s = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s += em[i][idx(labels[i])];
    if (i > 0) s += model.transition(labels[i - 1], labels[i]);
  }
  return s;
}

double log_partition(const CrfModel& model, std::span<const std::string> chars) {
  return forward_backward(emission_scores(model, model.featurize(chars)), transition_matrix(model))
      .log_z;
}

std::vector<std::array<double, kTags>> marginals(const CrfModel& model,
                                                 std::span<const std::string> chars) {
  const auto lat =
      forward_backward(emission_scores(model, model.featurize(chars)), transition_matrix(model));
  std::vector<Row> out(chars.size());
  for (std::size_t i = 0; i < chars.size(); ++i) {
    for (std::size_t t = 0; t < kTags; ++t) {
      out[i][t] = std::exp(lat.alpha[i][t] + lat.beta[i][t] - lat.log_z);
    }
  }
  return out;
}

LogLikelihood log_likelihood_and_gradient(const CrfModel& model,
                                          std::span<const BmesSequence> data) {
  LogLikelihood ll;
  ll.gradient.assign(model.num_parameters(), 0.0);
  const std::size_t trans_base = model.num_features() * kTags;
  const auto tr = transition_matrix(model);

  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto& seq = data[k];
    if (seq.chars.size() != seq.labels.size() || !is_well_formed(seq.labels)) {
      throw DataError("malformed gold labels at index " + std::to_string(k));
    }
    const auto feats = model.featurize(seq.chars);
    const auto em = emission_scores(model, feats);
    const auto lat = forward_backward(em, tr);
    const std::size_t n = seq.chars.size();

    double gold = 0;
    for (std::size_t i = 0; i < n; ++i) {
      gold += em[i][idx(seq.labels[i])];
      if (i > 0) gold += tr[idx(seq.labels[i - 1])][idx(seq.labels[i])];
    }
    ll.value += gold - lat.log_z;

    for (std::size_t i = 0; i < n; ++i) {
      Row delta{};
      for (std::size_t t = 0; t < kTags; ++t) {
        delta[t] = -std::exp(lat.alpha[i][t] + lat.beta[i][t] - lat.log_z);
      }
      delta[idx(seq.labels[i])] += 1.0;
      for (std::size_t f : feats[i]) {
        for (std::size_t t = 0; t < kTags; ++t) ll.gradient[f * kTags + t] += delta[t];
      }
      if (i == 0) continue;
      ll.gradient[trans_base + kSlots[idx(seq.labels[i - 1])][idx(seq.labels[i])]] += 1.0;
      for (std::size_t a = 0; a < kTags; ++a) {
        for (std::size_t b = 0; b < kTags; ++b) {
          const std::size_t slot = kSlots[a][b];
          if (slot == kNoSlot) continue;
          const double lp = lat.alpha[i - 1][a] + tr[a][b] + em[i][b] + lat.beta[i][b] - lat.log_z;
          if (lp != kNegInf) ll.gradient[trans_base + slot] -= std::exp(lp);
        }
      }
    }
  }

  const auto params = model.parameters();
  ll.value -= 0.5 * model.l2() * dot(params, params);
  for (std::size_t j = 0; j < params.size(); ++j) ll.gradient[j] -= model.l2() * params[j];
  return ll;
}

CrfModel train_crf(const SegmentationDataset& dataset, const CrfOptions& options,
                   CrfTrace* trace) {
  if (dataset.mode != SegMode::surface) {
    throw UnsupportedModeError("CRF training needs a surface-mode dataset");
  }
  if (options.history == 0) throw ConfigError("L-BFGS history must be positive");
  CrfModel model(options.delta, options.l2);
  std::vector<BmesSequence> data;
  data.reserve(dataset.entries.size());
  for (const auto& entry : dataset.entries) {
    data.push_back(to_bmes(entry));
    const auto& chars = data.back().chars;
    for (std::size_t i = 0; i < chars.size(); ++i) {
      for (const auto& f : extract_features(chars, i, options.delta)) model.intern(f);
    }
  }

  const Objective objective{&data, &model};
  std::vector<double> x(model.num_parameters(), 0.0);
  std::vector<double> g;
  double f = objective(x, g);
  if (trace != nullptr) trace->objectives.push_back(-f);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> memory;
  std::vector<double> d(x.size()), xn(x.size()), gn;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    const double gnorm = std::sqrt(dot(g, g));
    if (gnorm < options.tolerance) break;

    // Two-loop recursion for d = -H g.
    d = g;
    std::vector<double> a(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      a[k] = memory[k].rho * dot(memory[k].s, d);
      for (std::size_t j = 0; j < d.size(); ++j) d[j] -= a[k] * memory[k].y[j];
    }
    if (!memory.empty()) {
      const auto& last = memory.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double b = memory[k].rho * dot(memory[k].y, d);
      for (std::size_t j = 0; j < d.size(); ++j) d[j] += (a[k] - b) * memory[k].s[j];
    }
    for (double& v : d) v = -v;
    double slope = dot(g, d);
    if (!(slope < 0)) {
      memory.clear();
      for (std::size_t j = 0; j < d.size(); ++j) d[j] = -g[j];
      slope = -gnorm * gnorm;
    }

    double step = memory.empty() ? 1.0 / gnorm : 1.0;
    bool accepted = false;
    double fn = f;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t j = 0; j < x.size(); ++j) xn[j] = x[j] + step * d[j];
      fn = objective(xn, gn);
      if (fn <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      model.set_parameters(x);
      break;
    }

    Pair p{std::vector<double>(x.size()), std::vector<double>(x.size()), 0};
    for (std::size_t j = 0; j < x.size(); ++j) {
      p.s[j] = xn[j] - x[j];
      p.y[j] = gn[j] - g[j];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12) {
      p.rho = 1.0 / sy;
      memory.push_back(std::move(p));
      if (memory.size() > options.history) memory.pop_front();
    }
    const double gain = f - fn;
    x.swap(xn);
    g.swap(gn);
    f = fn;
    if (trace != nullptr) trace->objectives.push_back(-f);
    if (gain <= 1e-12 * std::max(1.0, std::abs(f))) break;
  }
  model.set_parameters(x);
  return model;
}

std::vector<Tag> crf_viterbi(const CrfModel& model, std::span<const std::string> chars) {
  const std::size_t n = chars.size();
  if (n == 0) return {};
  const auto em = emission_scores(model, model.featurize(chars));
  const auto tr = transition_matrix(model);

  // best[i][t]: best score of positions i..n-1 given label t at i.
  std::vector<Row> best(n, Row{kNegInf, kNegInf, kNegInf, kNegInf});
  for (std::size_t t = 0; t < kTags; ++t) {
    if (tag_end_allowed(static_cast<Tag>(t))) best[n - 1][t] = em[n - 1][t];
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    for (std::size_t t = 0; t < kTags; ++t) {
      double m = kNegInf;
      for (std::size_t u = 0; u < kTags; ++u) m = std::max(m, tr[t][u] + best[i + 1][u]);
      best[i][t] = em[i][t] + m;
    }
  }

  auto close = [](double a, double target) {
    return a >= target - 1e-9 * std::max(1.0, std::abs(target));
  };
  std::vector<Tag> labels;
  labels.reserve(n);
  double target = kNegInf;
  for (std::size_t t = 0; t < kTags; ++t) {
    if (tag_start_allowed(static_cast<Tag>(t))) target = std::max(target, best[0][t]);
  }
  for (std::size_t t = 0; t < kTags; ++t) {
    if (tag_start_allowed(static_cast<Tag>(t)) && close(best[0][t], target)) {
      labels.push_back(static_cast<Tag>(t));
      break;
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t p = idx(labels.back());
    const double rest = best[i - 1][p] - em[i - 1][p];
    for (std::size_t u = 0; u < kTags; ++u) {
      if (tr[p][u] != kNegInf && close(tr[p][u] + best[i][u], rest)) {
        labels.push_back(static_cast<Tag>(u));
        break;
      }
    }
  }
  return labels;
}

SegmentedWord crf_decode(const CrfModel& model, std::string_view word) {
  if (word.empty()) throw DataError("cannot segment an empty word");
  BmesSequence seq;
  seq.chars = text::split_chars(word);
  seq.labels = crf_viterbi(model, seq.chars);
  SegmentedWord out{std::string(word), from_bmes(seq), SegMode::surface};
  validate(out);
  return out;
}

}  // namespace polyseg
