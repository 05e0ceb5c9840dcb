// Acceptance checks, one per criterion: polyseg_acceptance --criterion N

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "polyseg/bpe.hpp"
#include "polyseg/crf.hpp"
#include "polyseg/flatcat.hpp"
#include "polyseg/morfessor.hpp"
#include "polyseg/mt_metrics.hpp"
#include "polyseg/report.hpp"
#include "polyseg/seg_metrics.hpp"
#include "polyseg/significance.hpp"
#include "polyseg/text.hpp"

using namespace polyseg;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, skip };

class Checks {
 public:
  void check(bool ok, const std::string& what) {
    std::cout << (ok ? "  ok    " : "  FAIL  ") << what << '\n';
    if (!ok) failed_ = true;
  }
  bool failed() const { return failed_; }

 private:
  bool failed_ = false;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string run_cli(const std::vector<std::string>& args, int& code) {
  std::ostringstream out, err;
  code = cli::run(args, out, err);
  if (code != 0) std::cout << "  cli: " << err.str();
  return out.str();
}

// Parses a TSV report into rows of fields; the header becomes row 0.
std::vector<std::vector<std::string>> tsv(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      auto pos = line.find('\t', start);
      f.push_back(line.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    rows.push_back(std::move(f));
  }
  return rows;
}

std::string field(const std::vector<std::vector<std::string>>& rows, const std::string& side,
                  const std::string& column) {
  if (rows.size() < 2) return "<missing>";
  const auto& header = rows[0];
  const auto col = static_cast<std::size_t>(
      std::find(header.begin(), header.end(), column) - header.begin());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if ((side.empty() || rows[i].at(0) == side) && col < rows[i].size()) return rows[i][col];
  }
  return "<missing>";
}

void expect_field(Checks& c, const std::vector<std::vector<std::string>>& rows,
                  const std::string& side, const std::string& column, const std::string& want) {
  const auto got = field(rows, side, column);
  c.check(got == want, fmt::format("{}{} = {} (got {})", side.empty() ? "" : side + " ", column,
                                   want, got));
}

Outcome criterion_1(Checks& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = fixtures::scratch_dir("acceptance_1");
  const auto f = fixtures::write_tar_spa_counts(dir);
  std::cout << "  released tar-spa files unavailable; using hand-counted synthetic fixtures\n";
  const double t_fixture = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  int code = 0;
  const auto train = tsv(run_cli({"stats", "--source", f.train_source.string(), "--target",
                                  f.train_target.string()}, code));
  c.check(code == 0, "stats on train exits 0");
  const auto dev = tsv(run_cli({"stats", "--source", f.dev_source.string(), "--target",
                                f.dev_target.string(), "--ref-source", f.train_source.string(),
                                "--ref-target", f.train_target.string()}, code));
  c.check(code == 0, "stats on dev exits 0");
  const double t_stats = seconds_since(t1);
  expect_field(c, train, "source", "S", "13102");
  expect_field(c, train, "source", "N", "73022");
  expect_field(c, train, "source", "V", "19044");
  expect_field(c, train, "source", "V1", "12894");
  expect_field(c, train, "target", "N", "93410");
  expect_field(c, dev, "source", "OOV", "573");
  expect_field(c, dev, "source", "pctOOV", "0.334");
  c.check(t_stats < 5.0, fmt::format("stats runtime {:.2f}s < 5s (fixture generation {:.2f}s)",
                                     t_stats, t_fixture));
  return c.failed() ? Outcome::fail : Outcome::pass;
}

Outcome criterion_2(Checks& c) {
  const auto dir = fixtures::scratch_dir("acceptance_2");
  std::cout << "  released segmentation files unavailable; using hand-counted synthetic fixtures\n";
  auto write = [&](const fs::path& path, const SegmentationDataset& d) {
    std::ofstream out(path, std::ios::binary);
    write_segmentation(out, d);
  };
  const auto shp = fixtures::seg_dataset("shp", {604, 437, 1215, 476, 5}, SegMode::canonical, {}, 21);
  const auto tar_train = fixtures::seg_dataset("tar", {504, 323, 1028, 474, 5}, SegMode::surface, {}, 22);
  const auto tar_test = fixtures::seg_dataset("tar", {274, 178, 563, 287, 5, 163}, SegMode::surface,
                                              fixtures::morph_types(tar_train), 23);
  write(dir / "shp.train.tsv", shp);
  write(dir / "tar.train.tsv", tar_train);
  write(dir / "tar.test.tsv", tar_test);

  int code = 0;
  const auto s = tsv(run_cli({"seg-stats", "--input", (dir / "shp.train.tsv").string(), "--mode",
                              "canonical"}, code));
  c.check(code == 0, "seg-stats on shp train exits 0");
  expect_field(c, s, "", "Words", "604");
  expect_field(c, s, "", "Morphs", "1215");
  expect_field(c, s, "", "Morphs/W", "2.01");
  expect_field(c, s, "", "Seg/W", "0.72");
  const auto t = tsv(run_cli({"seg-stats", "--input", (dir / "tar.test.tsv").string(),
                              "--reference", (dir / "tar.train.tsv").string()}, code));
  c.check(code == 0, "seg-stats on tar test exits 0");
  expect_field(c, t, "", "OOV-M", "163");
  return c.failed() ? Outcome::fail : Outcome::pass;
}

Outcome criterion_3(Checks& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  const std::vector<std::string> alphabet{"a", "e", "i", "k", "n", "t", "w", "ɨ"};
  std::size_t mismatched = 0, merges = 0;
  for (int corpus = 0; corpus < 50; ++corpus) {
    WordCounts counts;
    const std::size_t types = 1 + fixtures::below(rng, 20);
    while (counts.size() < types) {
      counts[fixtures::random_word(rng, alphabet, 1, 8)] += 1 + fixtures::below(rng, 6);
    }
    const std::size_t target = 5 + fixtures::below(rng, 60);
    const auto model = train_bpe(counts, target);
    merges += model.merges().size();
    if (model.merges() != oracle::bpe_merges(counts, target)) ++mismatched;
  }
  c.check(mismatched == 0, fmt::format("50 corpora, {} merges, {} corpora differ from the oracle",
                                       merges, mismatched));

  const std::vector<std::string> fuzz{"a", "k", "ñ", "ʼ", "ɨ", "中", "😀", "-", "'"};
  WordCounts counts;
  for (int i = 0; i < 300; ++i) counts[fixtures::random_word(rng, fuzz, 1, 9)]++;
  const auto model = train_bpe(counts, 200);
  std::size_t failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto w = fixtures::random_word(rng, fuzz, 1, 14);
    std::vector<std::string> pieces;
    for (const auto& p : model.encode(w)) pieces.push_back(p.text);
    if (bpe_decode(pieces, model.marker()) != w) ++failures;
  }
  c.check(failures == 0, fmt::format("round trip on 10000 fuzzed words, {} failures", failures));
  const double t = seconds_since(t0);
  c.check(t < 30.0, fmt::format("runtime {:.2f}s < 30s", t));
  return c.failed() ? Outcome::fail : Outcome::pass;
}

WordCounts toy_corpus(std::mt19937_64& rng, std::size_t types) {
  const std::vector<std::string> stems{"tak", "nuk", "ita", "kan", "wir", "sem"};
  const std::vector<std::string> affixes{"", "a", "in", "tu", "ki", "ra"};
  WordCounts counts;
  while (counts.size() < types) {
    std::string w = affixes[fixtures::below(rng, affixes.size())] +
                    stems[fixtures::below(rng, stems.size())] +
                    affixes[fixtures::below(rng, affixes.size())];
    counts[w] += 1 + fixtures::below(rng, 8);
  }
  return counts;
}

Outcome criterion_4(Checks& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const WordCounts four{{"taka", 5}, {"tasu", 5}, {"mika", 5}, {"misu", 5}};
  TrainingTrace trace;
  const auto model = train_baseline(four, {}, &trace);
  const auto best = oracle::morf_global_minimum(four, 1.0);
  const double got = mdl_cost(model).total;
  std::string analysis;
  for (const auto& [w, ms] : model.analyses) analysis += " " + text::join(ms, "+");
  std::string optimum;
  for (const auto& [w, ms] : best.analyses) optimum += " " + text::join(ms, "+");
  c.check(std::abs(got - best.cost) <= 1e-9,
          fmt::format("four-word corpus: final cost {:.6f} vs global minimum {:.6f}", got,
                      best.cost));
  std::cout << "        trained:" << analysis << "\n        optimum:" << optimum << '\n';

  std::mt19937_64 rng(4);
  std::size_t bad_epochs = 0, corpora = 0;
  std::vector<WordCounts> corpora_list{four};
  for (int i = 0; i < 10; ++i) corpora_list.push_back(toy_corpus(rng, 10 + 5 * i));
  for (const auto& counts : corpora_list) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      TrainingTrace tr;
      MorfessorOptions o;
      o.alpha = alpha;
      train_baseline(counts, o, &tr);
      LmvrOptions lo;
      lo.alpha = alpha;
      TrainingTrace tl;
      train_lmvr(counts, lo, &tl);
      for (const auto* t : {&tr, &tl}) {
        ++corpora;
        for (std::size_t e = 1; e < t->epoch_costs.size(); ++e) {
          if (t->epoch_costs[e] > t->epoch_costs[e - 1]) ++bad_epochs;
        }
      }
    }
  }
  c.check(bad_epochs == 0, fmt::format("per-epoch cost non-increasing on {} training runs", corpora));

  const auto probe = train_baseline(toy_corpus(rng, 40));
  const std::vector<std::string> alphabet{"a", "i", "k", "n", "t", "u", "r", "z"};
  std::size_t viterbi_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto w = fixtures::random_word(rng, alphabet, 1, 10);
    const auto seg = viterbi_segment(probe, w);
    if (text::join(seg, "") != w ||
        std::abs(segmentation_cost(probe, seg) - oracle::viterbi_brute_force(probe, w)) > 1e-9) {
      ++viterbi_bad;
    }
  }
  c.check(viterbi_bad == 0,
          fmt::format("Viterbi equals exhaustive minimum on 1000 words, {} mismatches", viterbi_bad));
  const double t = seconds_since(t0);
  c.check(t < 60.0, fmt::format("runtime {:.2f}s < 60s", t));
  return c.failed() ? Outcome::fail : Outcome::pass;
}

Outcome criterion_5(Checks& c) {
  std::mt19937_64 rng(5);
  std::size_t runs = 0, violations = 0, states = 0;
  for (int i = 0; i < 6; ++i) {
    const auto counts = toy_corpus(rng, 15 + 5 * i);
    std::set<std::string> alphabet;
    for (const auto& [w, _] : counts) {
      for (auto& ch : text::split_chars(w)) alphabet.insert(ch);
    }
    for (std::size_t extra : {0u, 2u, 5u, 10u}) {
      LmvrOptions lo;
      lo.max_lexicon_size = alphabet.size() + extra;
      TrainingTrace trace;
      const auto model = train_lmvr(counts, lo, &trace);
      ++runs;
      states += trace.accepted_states;
      if (trace.max_lexicon_measure > *lo.max_lexicon_size) ++violations;
      if (extra == 0) {
        bool chars_only = true;
        for (const auto& [m, _] : model.lexicon) chars_only &= text::char_length(m) == 1;
        for (const auto& [w, ms] : model.analyses) chars_only &= ms.size() == text::char_length(w);
        c.check(chars_only, fmt::format("cap = |alphabet| = {} gives character segmentation",
                                        alphabet.size()));
      }
    }
  }
  c.check(violations == 0, fmt::format("{} runs, {} accepted states, cap never exceeded", runs,
                                       states));
  return c.failed() ? Outcome::fail : Outcome::pass;
}

Outcome criterion_6(Checks& c) {
  std::mt19937_64 rng(6);
  for (int corpus = 0; corpus < 3; ++corpus) {
    const auto counts = toy_corpus(rng, 20 + 10 * corpus);
    const auto base = train_baseline(counts);
    FlatcatTrace trace;
    const auto fc = train_flatcat(counts, base, {}, &trace);
    bool monotone = trace.log_likelihoods.size() == 21;
    for (std::size_t i = 1; i < trace.log_likelihoods.size(); ++i) {
      monotone &= trace.log_likelihoods[i] >= trace.log_likelihoods[i - 1] - 1e-9;
    }
    c.check(monotone, fmt::format("corpus {}: log-likelihood {:.4f} -> {:.4f} non-decreasing "
                                  "over 20 iterations",
                                  corpus + 1, trace.log_likelihoods.front(),
                                  trace.log_likelihoods.back()));
    double worst = 0;
    const auto& cm = *fc.categories;
    for (const auto& row : cm.log_transitions) {
      double s = 0;
      for (double v : row) s += std::exp(v);
      worst = std::max(worst, std::abs(s - 1));
    }
    for (std::size_t cat = 0; cat < kCategories; ++cat) {
      double s = 0;
      for (const auto& [_, e] : cm.log_emissions) s += std::exp(e[cat]);
      worst = std::max(worst, std::abs(s - 1));
    }
    c.check(worst <= 1e-9, fmt::format("corpus {}: tables normalized, max error {:.2e}",
                                       corpus + 1, worst));
  }
  return c.failed() ? Outcome::fail : Outcome::pass;
}

BmesSequence bmes(const std::string& w, std::vector<std::string> morphs) {
  return to_bmes(SegmentedWord{w, std::move(morphs), SegMode::surface});
}

Outcome criterion_7(Checks& c) {
  const std::vector<BmesSequence> toy{bmes("nikan", {"ni", "kan"}), bmes("kawi", {"ka", "wi"}),
                                      bmes("tetewa", {"te", "te", "wa"}), bmes("a", {"a"}),
                                      bmes("kanniwa", {"kan", "ni", "wa"})};
  CrfModel model(2, 0.1);
  for (const auto& s : toy) {
    for (std::size_t i = 0; i < s.chars.size(); ++i) {
      for (const auto& f : extract_features(s.chars, i, 2)) model.intern(f);
    }
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  auto params = model.parameters();
  for (auto& v : params) v = u(rng);
  model.set_parameters(params);
  const auto ll = log_likelihood_and_gradient(model, toy);
  double worst = 0;
  const double h = 1e-5;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double keep = params[k];
    params[k] = keep + h;
    model.set_parameters(params);
    const double up = log_likelihood_and_gradient(model, toy).value;
    params[k] = keep - h;
    model.set_parameters(params);
    const double down = log_likelihood_and_gradient(model, toy).value;
    params[k] = keep;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - ll.gradient[k]) / std::max(1.0, std::abs(fd)));
  }
  model.set_parameters(params);
  c.check(worst < 1e-4, fmt::format("gradient vs central differences on {} parameters, max "
                                    "relative error {:.2e}",
                                    params.size(), worst));

  SegmentationDataset fixture;
  for (const auto& s : toy) fixture.entries.push_back({text::join(s.chars, ""), from_bmes(s), SegMode::surface});
  const auto trained = train_crf(fixture);
  const std::vector<std::string> alphabet{"a", "i", "k", "n", "t", "w"};
  std::size_t words = 0, viterbi_bad = 0;
  for (const CrfModel* m : std::initializer_list<const CrfModel*>{&model, &trained}) {
    for (int i = 0; i < 150; ++i) {
      const auto chars = text::split_chars(fixtures::random_word(rng, alphabet, 1, 8));
      const auto e = oracle::crf_enumerate(*m, chars);
      ++words;
      if (crf_viterbi(*m, chars) != e.best) ++viterbi_bad;
    }
    for (const auto& s : toy) {
      ++words;
      if (crf_viterbi(*m, s.chars) != oracle::crf_enumerate(*m, s.chars).best) ++viterbi_bad;
    }
  }
  c.check(viterbi_bad == 0,
          fmt::format("Viterbi equals brute-force argmax on {} words up to 8 chars", words));

  double mass_err = 0;
  for (int i = 0; i < 200; ++i) {
    const auto chars = text::split_chars(fixtures::random_word(rng, alphabet, 1, 6));
    const auto e = oracle::crf_enumerate(model, chars);
    mass_err = std::max(mass_err, std::abs(e.total_probability - 1));
    mass_err = std::max(mass_err, std::abs(e.log_z - log_partition(model, chars)));
  }
  c.check(mass_err <= 1e-9, fmt::format("sum of p(y|x) = 1 for |x| <= 6, max error {:.2e}", mass_err));

  SegmentationDataset one;
  one.entries.push_back({"nikanwa", {"ni", "kan", "wa"}, SegMode::surface});
  CrfOptions o;
  o.l2 = 0;
  const auto single = train_crf(one, o);
  const auto decoded = crf_decode(single, "nikanwa").morphs;
  c.check(decoded == one.entries[0].morphs,
          "single-example training recovers ni+kan+wa (got " + text::join(decoded, "+") + ")");
  return c.failed() ? Outcome::fail : Outcome::pass;
}

std::vector<std::string> data_lines(const std::string& name) {
  std::ifstream in(std::string(POLYSEG_TEST_DATA_DIR) + "/" + name);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

Outcome criterion_8(Checks& c) {
  const std::vector<std::string> same{"Ein Haus .", "a b c d", "ñandú, 3-4 \"x\""};
  c.check(corpus_bleu(same, same).score == 100.0, "identical corpora: BLEU = 100.0");
  c.check(corpus_chrf(same, same).score == 100.0, "identical corpora: chrF = 100.0");

  auto near4 = [](double a, double b) { return report::format_fixed(a, 4) == report::format_fixed(b, 4); };
  const double bleu_hand = 100 * std::pow(0.75 * (2.0 / 3) * 0.5 * 0.5, 0.25);
  const double bleu = sentence_bleu("a b c d", "a b c c");
  c.check(near4(bleu, bleu_hand), fmt::format("\"a b c d\" vs \"a b c c\": BLEU {:.4f}, by hand {:.4f}",
                                              bleu, bleu_hand));
  const double chrf_hand = 100 * (2.0 / 3 + 0.5 + 0) / 3;
  const double chrf = sentence_chrf("abc", "abd");
  c.check(near4(chrf, chrf_hand),
          fmt::format("\"abc\" vs \"abd\": chrF {:.4f}, by hand {:.4f}", chrf, chrf_hand));

  std::size_t pairs = 0, pair_bad = 0;
  std::vector<std::string> hyps, refs;
  for (const auto& line : data_lines("mt_pairs.tsv")) {
    const auto f = split_tab(line);
    ++pairs;
    hyps.push_back(f[0]);
    refs.push_back(f[1]);
    if (!near4(sentence_bleu(f[0], f[1]), report::parse_real(f[2])) ||
        !near4(sentence_chrf(f[0], f[1]), report::parse_real(f[3]))) {
      ++pair_bad;
    }
  }
  std::map<std::string, double> corpus;
  for (const auto& line : data_lines("mt_corpus.tsv")) {
    const auto f = split_tab(line);
    corpus[f[0]] = report::parse_real(f[1]);
  }
  pair_bad += !near4(corpus_bleu(hyps, refs).score, corpus["bleu"]);
  pair_bad += !near4(corpus_chrf(hyps, refs).score, corpus["chrf"]);
  c.check(pairs > 0 && pair_bad == 0,
          fmt::format("{} golden sentence pairs plus corpus scores match to 4 places", pairs));

  const auto in = data_lines("tok13a_input.txt");
  const auto want = data_lines("tok13a_expected.txt");
  std::size_t tok_bad = in.size() == want.size() && !in.empty() ? 0 : 1;
  for (std::size_t i = 0; i < std::min(in.size(), want.size()); ++i) {
    std::string line;
    for (std::size_t k = 0; k < in[i].size(); ++k) {
      if (in[i][k] == '\\' && k + 1 < in[i].size() && in[i][k + 1] == 'n') {
        line += '\n';
        ++k;
      } else {
        line += in[i][k];
      }
    }
    if (tokenize_13a(line) != want[i]) ++tok_bad;
  }
  c.check(tok_bad == 0, fmt::format("13a tokenizer matches {} golden lines byte for byte", want.size()));
  return c.failed() ? Outcome::fail : Outcome::pass;
}

Outcome criterion_9(Checks& c) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> vocab{"el", "la", "casa", "perro", "come", "ve", "un", "."};
  auto sentence = [&] {
    std::string s;
    const auto n = 3 + fixtures::below(rng, 8);
    for (std::uint64_t k = 0; k < n; ++k) s += (k ? " " : "") + vocab[fixtures::below(rng, vocab.size())];
    return s;
  };
  std::vector<std::string> a, b, r;
  for (int i = 0; i < 1000; ++i) {
    r.push_back(sentence());
    a.push_back(fixtures::below(rng, 3) == 0 ? r.back() : sentence());
    b.push_back(sentence());
  }
  const auto same = paired_randomization_test(MtMetric::bleu, a, a, r);
  c.check(same.p_value == 1.0, fmt::format("identical systems: p = {}", same.p_value));

  const std::vector<std::string> a2{"el perro come", "la casa"}, b2{"el casa ve", "un perro"},
      r2{"el perro come", "la casa ."};
  for (auto metric : {MtMetric::bleu, MtMetric::chrf}) {
    const auto res = paired_randomization_test(metric, a2, b2, r2);
    const double obs = std::abs(corpus_score(metric, a2, r2).score - corpus_score(metric, b2, r2).score);
    int hits = 0;
    for (int mask = 0; mask < 4; ++mask) {
      auto x = a2, y = b2;
      for (int i = 0; i < 2; ++i) {
        if ((mask >> i) & 1) std::swap(x[i], y[i]);
      }
      hits += std::abs(corpus_score(metric, x, r2).score - corpus_score(metric, y, r2).score) >=
              obs - 1e-9;
    }
    c.check(res.exact && res.p_value == hits / 4.0,
            fmt::format("2-sentence {}: p = {} vs enumeration {}", to_string(metric), res.p_value,
                        hits / 4.0));
  }

  for (auto metric : {MtMetric::bleu, MtMetric::chrf}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto x = paired_randomization_test(metric, a, b, r);
    const double t = seconds_since(t0);
    const auto y = paired_randomization_test(metric, a, b, r);
    c.check(x.trials == 10000 && std::memcmp(&x.p_value, &y.p_value, sizeof(double)) == 0,
            fmt::format("{}: fixed seed gives bit-identical p = {} over 10000 trials",
                        to_string(metric), x.p_value));
    c.check(t < 10.0, fmt::format("{}: 1000 sentences, 10000 trials in {:.2f}s < 10s",
                                  to_string(metric), t));
  }
  return c.failed() ? Outcome::fail : Outcome::pass;
}

Outcome criterion_10(Checks& c) {
  std::mt19937_64 rng(10);
  std::size_t bad = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t rows = 1 + fixtures::below(rng, 6);
    const std::size_t cols = 1 + fixtures::below(rng, 6);
    std::vector<std::vector<std::uint64_t>> w(rows, std::vector<std::uint64_t>(cols));
    for (auto& row : w) {
      for (auto& v : row) v = fixtures::below(rng, 4) == 0 ? 0 : fixtures::below(rng, 12);
    }
    if (max_weight_matching(w).weight != oracle::matching_brute_force(w)) ++bad;
  }
  c.check(bad == 0, fmt::format("matching equals brute force on 100 random graphs up to 6x6, {} "
                                "mismatches",
                                bad));
  const auto d = fixtures::seg_dataset("m", {60, 40, 130, 25, 4}, SegMode::surface, {}, 10);
  const auto s = emma_f1(d, d);
  c.check(s.f1 == 1.0 && s.precision == 1.0 && s.recall == 1.0,
          fmt::format("identical datasets: EMMA F1 = {}", s.f1));
  const auto canon = fixtures::seg_dataset("m", {30, 20, 60, 20, 4}, SegMode::canonical, {}, 11);
  c.check(emma_f1(canon, canon).f1 == 1.0, "identical canonical datasets: EMMA F1 = 1");
  return c.failed() ? Outcome::fail : Outcome::pass;
}

// Synthetic agglutinative words with known morph boundaries.
SegmentationDataset synthetic_surface(std::mt19937_64& rng, std::size_t n) {
  const std::vector<std::string> pre{"", "", "ni", "ki", "mo"};
  const std::vector<std::string> stems{"kua", "tlal", "chiw", "neki", "itta", "kochi", "tlakwa",
                                       "pano", "mati", "nemi", "kaki", "tekiti"};
  const std::vector<std::string> suf{"", "", "ke", "lia", "tok", "s", "ni"};
  SegmentationDataset d;
  for (std::size_t i = 0; i < n; ++i) {
    SegmentedWord w;
    for (const auto* list : {&pre, &stems, &suf}) {
      const auto& m = (*list)[fixtures::below(rng, list->size())];
      if (!m.empty()) w.morphs.push_back(m);
    }
    w.surface = text::join(w.morphs, "");
    d.entries.push_back(std::move(w));
  }
  return d;
}

Outcome criterion_11(Checks& c) {
  std::cout << "  hch segmentation data is not bundled; running a synthetic proxy instead\n";
  std::mt19937_64 rng(11);
  const auto train = synthetic_surface(rng, 400);
  const auto test = synthetic_surface(rng, 200);
  WordCounts words;
  for (const auto& e : train.entries) words[e.surface]++;
  auto score_with = [&](const std::function<std::vector<std::string>(const std::string&)>& seg) {
    SegmentationDataset pred;
    for (const auto& e : test.entries) pred.entries.push_back({e.surface, seg(e.surface), SegMode::surface});
    return boundary_f1(pred, test).f1;
  };
  const auto crf = train_crf(train);
  const auto base = train_baseline(words);
  LmvrOptions lo;
  const auto lmvr = train_lmvr(words, lo);
  const auto fc = train_flatcat(words, base);
  const double f_crf = score_with([&](const std::string& w) { return crf_decode(crf, w).morphs; });
  const double f_base = score_with([&](const std::string& w) { return segment(base, w); });
  const double f_lmvr = score_with([&](const std::string& w) { return segment(lmvr, w); });
  const double f_fc = score_with([&](const std::string& w) { return segment(fc, w); });
  std::cout << fmt::format("  proxy boundary F1: crf {:.4f}, morfessor {:.4f}, lmvr {:.4f}, "
                           "flatcat {:.4f} ({})\n",
                           f_crf, f_base, f_lmvr, f_fc,
                           f_crf > std::max({f_base, f_lmvr, f_fc}) ? "crf ahead"
                                                                     : "crf not ahead");
  (void)c;
  return Outcome::skip;
}

const std::vector<std::pair<std::string, std::function<Outcome(Checks&)>>> kCriteria{
    {"corpus statistics", criterion_1},
    {"segmentation-dataset statistics", criterion_2},
    {"BPE oracle suite", criterion_3},
    {"Morfessor oracle", criterion_4},
    {"LMVR constraint", criterion_5},
    {"FlatCat EM", criterion_6},
    {"CRF numerics", criterion_7},
    {"metrics golden values", criterion_8},
    {"significance test", criterion_9},
    {"EMMA", criterion_10},
    {"qualitative ordering (optional)", criterion_11},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> which;
  app.add_option("--criterion", which, "Criterion number, 1-11; all when omitted")
      ->check(CLI::Range(1, static_cast<int>(kCriteria.size())));
  CLI11_PARSE(app, argc, argv);
  if (which.empty()) {
    for (int i = 1; i <= static_cast<int>(kCriteria.size()); ++i) which.push_back(i);
  }
  int failures = 0;
  int skipped = 0;
  for (int n : which) {
    const auto& [name, fn] = kCriteria[static_cast<std::size_t>(n - 1)];
    std::cout << fmt::format("criterion {}: {}\n", n, name);
    Checks checks;
    Outcome outcome = Outcome::fail;
    try {
      outcome = fn(checks);
    } catch (const std::exception& e) {
      std::cout << "  error: " << e.what() << '\n';
    }
    const char* label = outcome == Outcome::pass ? "PASS" : outcome == Outcome::skip ? "SKIP" : "FAIL";
    std::cout << fmt::format("{} {} {}\n", label, n, name) << std::flush;
    if (outcome == Outcome::fail) ++failures;
    if (outcome == Outcome::skip) ++skipped;
  }
  if (failures > 0) return 1;
  // 77 marks a skip for ctest
  return skipped == static_cast<int>(which.size()) ? 77 : 0;
}
