#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "polyseg/analysis.hpp"
#include "polyseg/bpe.hpp"
#include "polyseg/corpus.hpp"
#include "polyseg/crf.hpp"
#include "polyseg/error.hpp"
#include "polyseg/flatcat.hpp"
#include "polyseg/model_io.hpp"
#include "polyseg/morfessor.hpp"
#include "polyseg/mt_metrics.hpp"
#include "polyseg/report.hpp"
#include "polyseg/seg_metrics.hpp"
#include "polyseg/segmenter.hpp"
#include "polyseg/significance.hpp"

namespace polyseg::cli {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string format;
  std::uint64_t seed = 1917;
  std::string output;

  // stats / seg-stats
  std::string source, target, ref_source, ref_target;
  std::string input, reference, mode = "surface";

  // train
  std::string method, model;
  std::size_t vocab_size = 5000;
  double alpha = 1.0;
  std::optional<std::size_t> cap;
  std::string weighting = "tokens";
  double epsilon = 0.1;
  std::size_t max_epochs = 100;
  std::size_t delta = 3;
  double l2 = 0.01;
  std::size_t max_iters = 200;
  std::size_t em_iterations = 20;

  // evaluation
  std::string pred, gold, seg_metric = "boundary";
  std::string hyp, ref, mt_metric = "bleu", sentence_output;
  std::string sys_a, sys_b;
  std::size_t trials = 10000;

  // analysis
  std::string probe_model, scores, bins_output, vocab;
  std::size_t bins = 10;
  std::vector<std::string> systems;
};

char separator(const RunConfig& cfg) { return cfg.format == "csv" ? ',' : '\t'; }

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

// Writes to --output when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw DataError("cannot write '" + path + "'");
    stream_ = &file_;
    to_file_ = true;
  }
  std::ostream& get() { return *stream_; }
  bool to_file() const { return to_file_; }
  void close(const std::string& path) {
    if (!file_.is_open()) return;
    file_.close();
    if (!file_) throw DataError("failed writing '" + path + "'");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
  bool to_file_ = false;
};

// The one-line summary goes to stdout unless stdout already carries the report.
void summary(const Sink& sink, std::ostream& out, std::ostream& err, const std::string& line) {
  (sink.to_file() ? out : err) << line << '\n';
}

SegMode mode_of(const RunConfig& cfg) {
  try {
    return parse_seg_mode(cfg.mode);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.ref_source.empty() != cfg.ref_target.empty()) {
    throw ConfigError("--ref-source and --ref-target must be given together");
  }
  const auto corpus = load_parallel(cfg.source, cfg.target);
  std::optional<ParallelCorpus> reference;
  if (!cfg.ref_source.empty()) reference = load_parallel(cfg.ref_source, cfg.ref_target);
  const auto stats = corpus_stats(corpus, reference ? &*reference : nullptr);
  Sink sink(cfg.output, out);
  write_corpus_stats_tsv(sink.get(), stats, separator(cfg));
  sink.close(cfg.output);
  summary(sink, out, err,
          fmt::format("S={} N_source={} N_target={} V_source={} V_target={}", stats.sentences,
                      stats.source.tokens, stats.target.tokens, stats.source.types,
                      stats.target.types));
  return 0;
}

int cmd_seg_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SegMode mode = mode_of(cfg);
  const auto data = load_segmentation(cfg.input, mode);
  std::optional<SegmentationDataset> reference;
  if (!cfg.reference.empty()) reference = load_segmentation(cfg.reference, mode);
  const auto stats = seg_stats(data, reference ? &*reference : nullptr);
  Sink sink(cfg.output, out);
  write_seg_stats_tsv(sink.get(), stats, separator(cfg));
  sink.close(cfg.output);
  summary(sink, out, err,
          fmt::format("Words={} Morphs={} UniMorphs={}", stats.words, stats.morphs,
                      stats.uni_morphs));
  return 0;
}

WordCounts training_words(const std::string& path) { return count_words(load_sentences(path)); }

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  if (cfg.method == "bpe") {
    auto model = train_bpe(training_words(cfg.input), cfg.vocab_size);
    save_model(cfg.model, model);
    out << fmt::format("trained bpe: vocab={} merges={}\n", model.vocab().size(),
                       model.merges().size());
    return 0;
  }
  if (cfg.method == "crf") {
    const auto data = load_segmentation(cfg.input, mode_of(cfg));
    CrfOptions options;
    options.delta = cfg.delta;
    options.l2 = cfg.l2;
    options.max_iterations = cfg.max_iters;
    CrfTrace trace;
    auto model = train_crf(data, options, &trace);
    save_model(cfg.model, model);
    out << fmt::format("trained crf: features={} objective={}\n", model.num_features(),
                       report::format_fixed(trace.objectives.back(), 6));
    return 0;
  }

  const auto words = training_words(cfg.input);
  MorfModel model;
  if (cfg.method == "morfessor" || cfg.method == "flatcat") {
    MorfessorOptions options;
    options.alpha = cfg.alpha;
    options.seed = cfg.seed;
    options.epsilon = cfg.epsilon;
    options.max_epochs = cfg.max_epochs;
    model = train_baseline(words, options);
    if (cfg.method == "flatcat") {
      FlatcatOptions fc;
      fc.max_iterations = cfg.em_iterations;
      model = train_flatcat(words, model, fc);
    }
  } else if (cfg.method == "lmvr") {
    LmvrOptions options;
    options.alpha = cfg.alpha;
    options.seed = cfg.seed;
    options.epsilon = cfg.epsilon;
    options.max_epochs = cfg.max_epochs;
    options.max_lexicon_size = cfg.cap;
    if (cfg.weighting == "types") {
      options.weighting = CountWeighting::types;
    } else if (cfg.weighting != "tokens") {
      throw ConfigError("--weighting must be 'types' or 'tokens'");
    }
    model = train_lmvr(words, options);
  } else {
    throw ConfigError("unknown method '" + cfg.method + "'");
  }
  save_model(cfg.model, model);
  out << fmt::format("trained {}: lexicon={} cost={}\n", to_string(model.variant),
                     model.lexicon.size(), report::format_fixed(mdl_cost(model).total, 4));
  return 0;
}

int cmd_segment(const RunConfig& cfg, std::ostream& out, bool inverse) {
  Segmenter segmenter(load_model(cfg.model));
  const auto lines = read_lines(cfg.input);
  Sink sink(cfg.output, out);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (inverse) {
      sink.get() << desegment_line(lines[i], segmenter.convention(), i + 1) << '\n';
    } else {
      try {
        sink.get() << segmenter.segment_line(lines[i]) << '\n';
      } catch (const DataError& e) {
        throw DataError(cfg.input + ":" + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }
  sink.close(cfg.output);
  if (sink.to_file()) {
    out << fmt::format("{} {} lines\n", inverse ? "desegmented" : "segmented", lines.size());
  }
  return 0;
}

int cmd_eval_seg(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SegMode mode = mode_of(cfg);
  const auto pred = load_segmentation(cfg.pred, mode);
  const auto gold = load_segmentation(cfg.gold, mode);
  SegScore score;
  std::string name;
  if (cfg.seg_metric == "boundary") {
    score = boundary_f1(pred, gold);
    name = "boundary_f1";
  } else if (cfg.seg_metric == "emma") {
    score = emma_f1(pred, gold);
    name = "emma_f1";
  } else {
    throw ConfigError("--metric must be 'boundary' or 'emma'");
  }
  const char sep = separator(cfg);
  Sink sink(cfg.output, out);
  sink.get() << "metric" << sep << "precision" << sep << "recall" << sep << "f1" << sep
             << "accuracy\n"
             << name << sep << report::format_fixed(score.precision, 4) << sep
             << report::format_fixed(score.recall, 4) << sep << report::format_fixed(score.f1, 4)
             << sep << report::format_fixed(score.accuracy, 4) << '\n';
  sink.close(cfg.output);
  summary(sink, out, err, fmt::format("{}={}", name, report::format_fixed(score.f1, 4)));
  return 0;
}

MtMetric mt_metric_of(const RunConfig& cfg) { return parse_mt_metric(cfg.mt_metric); }

int cmd_eval_mt(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const MtMetric metric = mt_metric_of(cfg);
  const auto rep = corpus_score(metric, read_lines(cfg.hyp), read_lines(cfg.ref));
  const char sep = separator(cfg);
  Sink sink(cfg.output, out);
  sink.get() << "metric" << sep << "score" << sep << "signature\n"
             << rep.metric << sep << report::format_fixed(rep.score, 4) << sep << rep.signature
             << '\n';
  sink.close(cfg.output);
  if (!cfg.sentence_output.empty()) {
    Sink sentences(cfg.sentence_output, out);
    sentences.get() << "idx" << sep << "score\n";
    for (std::size_t i = 0; i < rep.sentence_scores.size(); ++i) {
      sentences.get() << i << sep << report::format_fixed(rep.sentence_scores[i], 4) << '\n';
    }
    sentences.close(cfg.sentence_output);
  }
  summary(sink, out, err, fmt::format("{}={}", rep.metric, report::format_fixed(rep.score, 2)));
  return 0;
}

int cmd_signif(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const MtMetric metric = mt_metric_of(cfg);
  SignifOptions options;
  options.trials = cfg.trials;
  options.seed = cfg.seed;
  const auto res = paired_randomization_test(metric, read_lines(cfg.sys_a), read_lines(cfg.sys_b),
                                             read_lines(cfg.ref), options);
  const char sep = separator(cfg);
  Sink sink(cfg.output, out);
  sink.get() << "metric" << sep << "score_a" << sep << "score_b" << sep << "delta" << sep
             << "p_value" << sep << "trials" << sep << "exact" << sep << "significant" << sep
             << "signature\n"
             << to_string(metric) << sep << report::format_fixed(res.score_a, 4) << sep
             << report::format_fixed(res.score_b, 4) << sep << report::format_fixed(res.delta, 4)
             << sep << report::format_fixed(res.p_value, 4) << sep << res.trials << sep
             << (res.exact ? "yes" : "no") << sep << (res.significant ? "yes" : "no") << sep
             << signature(metric) << '\n';
  sink.close(cfg.output);
  summary(sink, out, err, fmt::format("p={}", report::format_fixed(res.p_value, 4)));
  return 0;
}

int cmd_richness(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto any = load_model(cfg.probe_model);
  const auto* probe = std::get_if<MorfModel>(&any);
  if (probe == nullptr) throw ConfigError("--probe-model must be a morf model");
  const auto sentences = load_sentences(cfg.input);
  std::vector<double> scores;
  if (!cfg.scores.empty()) {
    for (const auto& line : read_lines(cfg.scores)) {
      if (!line.empty()) scores.push_back(report::parse_real(line));
    }
  } else if (!cfg.hyp.empty() && !cfg.ref.empty()) {
    scores = corpus_chrf(read_lines(cfg.hyp), read_lines(cfg.ref)).sentence_scores;
  } else {
    throw ConfigError("give --scores, or --hyp and --ref for per-sentence chrF");
  }
  const auto records = richness_table(*probe, sentences, scores);
  const char sep = separator(cfg);
  Sink sink(cfg.output, out);
  write_richness_csv(sink.get(), records, sep);
  sink.close(cfg.output);
  if (!cfg.bins_output.empty()) {
    Sink bins(cfg.bins_output, out);
    write_bins_csv(bins.get(), bin_richness(records, cfg.bins), sep);
    bins.close(cfg.bins_output);
  }
  summary(sink, out, err, fmt::format("richness records={}", records.size()));
  return 0;
}

int cmd_unk(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ifstream vin(cfg.vocab, std::ios::binary);
  if (!vin) throw DataError("cannot open '" + cfg.vocab + "'");
  const auto vocab = read_vocabulary(vin);
  std::vector<UnkReport> reports;
  for (const auto& spec : cfg.systems) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--system expects NAME=PATH, got '" + spec + "'");
    }
    reports.push_back(unk_report(spec.substr(0, eq), load_sentences(spec.substr(eq + 1)), vocab));
  }
  Sink sink(cfg.output, out);
  write_unk_csv(sink.get(), reports, separator(cfg));
  sink.close(cfg.output);
  std::string line = "unk";
  for (const auto& r : reports) line += fmt::format(" {}={}", r.system, r.unk);
  summary(sink, out, err, line);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Subword segmentation and evaluation toolkit", "polyseg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "polyseg 0.1.0");

  auto add_format = [&](CLI::App* sub, const std::string& def) {
    sub->add_option("--format", cfg.format, "Report format, default " + def)
        ->check(CLI::IsMember({"tsv", "csv"}));
  };

  auto* stats = app.add_subcommand("stats", "Parallel corpus statistics");
  stats->add_option("--source", cfg.source, "Source side, one sentence per line")
      ->required()->check(CLI::ExistingFile);
  stats->add_option("--target", cfg.target, "Target side")->required()->check(CLI::ExistingFile);
  stats->add_option("--ref-source", cfg.ref_source, "Training source for OOV")
      ->check(CLI::ExistingFile);
  stats->add_option("--ref-target", cfg.ref_target, "Training target for OOV")
      ->check(CLI::ExistingFile);
  stats->add_option("--output", cfg.output);

  auto* seg_stats_cmd = app.add_subcommand("seg-stats", "Segmentation dataset statistics");
  seg_stats_cmd->add_option("--input", cfg.input)->required()->check(CLI::ExistingFile);
  seg_stats_cmd->add_option("--reference", cfg.reference, "Training split for OOV-M")
      ->check(CLI::ExistingFile);
  seg_stats_cmd->add_option("--mode", cfg.mode)->capture_default_str();
  seg_stats_cmd->add_option("--output", cfg.output);

  auto* train = app.add_subcommand("train", "Train a segmentation model");
  train->add_option("--method", cfg.method)
      ->required()
      ->check(CLI::IsMember({"bpe", "morfessor", "lmvr", "flatcat", "crf"}));
  train->add_option("--input", cfg.input, "Text corpus, or segmentation file for crf")
      ->required()->check(CLI::ExistingFile);
  train->add_option("--model", cfg.model, "Model file to write")->required();
  train->add_option("--vocab-size", cfg.vocab_size)->capture_default_str();
  train->add_option("--alpha", cfg.alpha)->capture_default_str();
  train->add_option("--cap", cfg.cap, "Lexicon size cap (lmvr)");
  train->add_option("--weighting", cfg.weighting, "types or tokens (lmvr)")->capture_default_str();
  train->add_option("--epsilon", cfg.epsilon)->capture_default_str();
  train->add_option("--max-epochs", cfg.max_epochs)->capture_default_str();
  train->add_option("--em-iterations", cfg.em_iterations)->capture_default_str();
  train->add_option("--delta", cfg.delta)->capture_default_str();
  train->add_option("--l2", cfg.l2)->capture_default_str();
  train->add_option("--max-iters", cfg.max_iters)->capture_default_str();
  train->add_option("--mode", cfg.mode, "Segmentation file mode (crf)")->capture_default_str();

  auto* segment_cmd = app.add_subcommand("segment", "Segment running text");
  auto* desegment_cmd = app.add_subcommand("desegment", "Undo segment");
  for (auto* sub : {segment_cmd, desegment_cmd}) {
    sub->add_option("--model", cfg.model)->required()->check(CLI::ExistingFile);
    sub->add_option("--input", cfg.input)->required()->check(CLI::ExistingFile);
    sub->add_option("--output", cfg.output);
  }

  auto* eval_seg = app.add_subcommand("eval-seg", "Score a segmentation against gold");
  eval_seg->add_option("--pred", cfg.pred)->required()->check(CLI::ExistingFile);
  eval_seg->add_option("--gold", cfg.gold)->required()->check(CLI::ExistingFile);
  eval_seg->add_option("--metric", cfg.seg_metric)
      ->check(CLI::IsMember({"boundary", "emma"}))->capture_default_str();
  eval_seg->add_option("--mode", cfg.mode)->capture_default_str();
  eval_seg->add_option("--output", cfg.output);

  auto* eval_mt = app.add_subcommand("eval-mt", "Corpus BLEU or chrF");
  eval_mt->add_option("--hyp", cfg.hyp)->required()->check(CLI::ExistingFile);
  eval_mt->add_option("--ref", cfg.ref)->required()->check(CLI::ExistingFile);
  eval_mt->add_option("--metric", cfg.mt_metric)
      ->check(CLI::IsMember({"bleu", "chrf"}))->capture_default_str();
  eval_mt->add_option("--sentence-output", cfg.sentence_output, "Per-sentence scores");
  eval_mt->add_option("--output", cfg.output);

  auto* signif = app.add_subcommand("signif", "Paired approximate randomization test");
  signif->add_option("--sys-a", cfg.sys_a)->required()->check(CLI::ExistingFile);
  signif->add_option("--sys-b", cfg.sys_b)->required()->check(CLI::ExistingFile);
  signif->add_option("--ref", cfg.ref)->required()->check(CLI::ExistingFile);
  signif->add_option("--metric", cfg.mt_metric)
      ->check(CLI::IsMember({"bleu", "chrf"}))->capture_default_str();
  signif->add_option("--trials", cfg.trials)->check(CLI::PositiveNumber)->capture_default_str();
  signif->add_option("--output", cfg.output);

  auto* analyze = app.add_subcommand("analyze", "Richness and UNK diagnostics");
  analyze->require_subcommand(1);
  auto* richness = analyze->add_subcommand("richness", "Morphs per token vs sentence score");
  richness->add_option("--probe-model", cfg.probe_model)->required()->check(CLI::ExistingFile);
  richness->add_option("--input", cfg.input, "Source sentences")
      ->required()->check(CLI::ExistingFile);
  richness->add_option("--scores", cfg.scores, "One score per line")->check(CLI::ExistingFile);
  richness->add_option("--hyp", cfg.hyp)->check(CLI::ExistingFile);
  richness->add_option("--ref", cfg.ref)->check(CLI::ExistingFile);
  richness->add_option("--bins", cfg.bins)->check(CLI::PositiveNumber)->capture_default_str();
  richness->add_option("--bins-output", cfg.bins_output);
  richness->add_option("--output", cfg.output);
  auto* unk = analyze->add_subcommand("unk", "UNK pieces under a fixed vocabulary");
  unk->add_option("--vocab", cfg.vocab)->required()->check(CLI::ExistingFile);
  unk->add_option("--system", cfg.systems, "NAME=PATH of segmented text")->required();
  unk->add_option("--output", cfg.output);

  for (auto* sub : {stats, seg_stats_cmd, eval_seg, eval_mt, signif}) add_format(sub, "tsv");
  for (auto* sub : {richness, unk}) add_format(sub, "csv");
  for (auto* sub : {train, signif}) {
    sub->add_option("--seed", cfg.seed)->capture_default_str();
  }

  std::vector<const char*> argv{"polyseg"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (cfg.format.empty()) cfg.format = richness->parsed() || unk->parsed() ? "csv" : "tsv";
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  try {
    if (stats->parsed()) return cmd_stats(cfg, out, err);
    if (seg_stats_cmd->parsed()) return cmd_seg_stats(cfg, out, err);
    if (train->parsed()) return cmd_train(cfg, out);
    if (segment_cmd->parsed()) return cmd_segment(cfg, out, false);
    if (desegment_cmd->parsed()) return cmd_segment(cfg, out, true);
    if (eval_seg->parsed()) return cmd_eval_seg(cfg, out, err);
    if (eval_mt->parsed()) return cmd_eval_mt(cfg, out, err);
    if (signif->parsed()) return cmd_signif(cfg, out, err);
    if (richness->parsed()) return cmd_richness(cfg, out, err);
    if (unk->parsed()) return cmd_unk(cfg, out, err);
  } catch (const Error& e) {
    err << "polyseg: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const fs::filesystem_error& e) {
    err << "polyseg: " << e.what() << '\n';
    return static_cast<int>(ExitCode::data);
  } catch (const std::exception& e) {
    err << "polyseg: internal error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numeric);
  }
  err << "polyseg: no subcommand\n";
  return static_cast<int>(ExitCode::usage);
}

}  // namespace polyseg::cli
