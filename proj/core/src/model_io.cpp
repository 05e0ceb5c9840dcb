#include "polyseg/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "polyseg/error.hpp"
#include "polyseg/report.hpp"
#include "polyseg/text.hpp"

namespace polyseg {
namespace {

constexpr std::array<std::string_view, kCategories + 1> kRowNames = {"START", "PRE", "STM", "SUF",
                                                                     "NON"};

class LineReader {
 public:
  LineReader(std::istream& in, std::string_view name) : in_(in), name_(name) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(name_ + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_uint(std::string_view s, const LineReader& reader) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    reader.fail("expected an unsigned integer, got '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s, const LineReader& reader) {
  try {
    return report::parse_real(s);
  } catch (const DataError&) {
    reader.fail("expected a number, got '" + std::string(s) + "'");
  }
}

BpeModel read_bpe_body(LineReader& reader, const std::vector<std::string_view>& header) {
  if (header.size() != 4) reader.fail("expected 'bpe v1 <target_vocab_size> <marker>'");
  const auto target = parse_uint(header[2], reader);
  std::string marker(header[3]);
  std::vector<BpeMerge> merges;
  std::set<std::string> symbols;
  bool in_alphabet = false;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line == "alphabet:") {
      in_alphabet = true;
      continue;
    }
    if (in_alphabet) {
      symbols.insert(line);
      continue;
    }
    const auto fields = split_on(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      reader.fail("expected 'left<TAB>right'");
    }
    merges.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  if (symbols.empty()) reader.fail("missing alphabet section");
  return BpeModel(static_cast<std::size_t>(target), std::move(marker), std::move(symbols),
                  std::move(merges));
}

MorfModel read_morf_body(LineReader& reader, const std::vector<std::string_view>& header) {
  if (header.size() != 4 && header.size() != 5) {
    reader.fail("expected 'morf v1 <variant> <alpha> [<cap>]'");
  }
  MorfModel m;
  try {
    m.variant = parse_morf_variant(header[2]);
  } catch (const DataError& e) {
    reader.fail(e.what());
  }
  m.weighting = m.variant == MorfVariant::lmvr ? CountWeighting::tokens : CountWeighting::types;
  m.alpha = parse_double(header[3], reader);
  if (header.size() == 5) m.max_lexicon_size = static_cast<std::size_t>(parse_uint(header[4], reader));

  enum class Section { lexicon, transitions, emissions } section = Section::lexicon;
  std::string line;
  std::size_t rows_seen = 0;
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line == "transitions:" || line == "emissions:") {
      if (m.variant != MorfVariant::flatcat) reader.fail("category block in a non-flatcat model");
      if (!m.categories) m.categories.emplace();
      section = line == "transitions:" ? Section::transitions : Section::emissions;
      continue;
    }
    const auto fields = split_on(line, '\t');
    switch (section) {
      case Section::lexicon: {
        if (fields.size() != 2 || fields[0].empty()) reader.fail("expected 'morph<TAB>count'");
        const auto count = parse_uint(fields[1], reader);
        if (!m.lexicon.emplace(std::string(fields[0]), count).second) {
          reader.fail("duplicate morph '" + std::string(fields[0]) + "'");
        }
        m.total_tokens += count;
        for (auto& c : text::split_chars(fields[0])) m.alphabet.insert(std::move(c));
        break;
      }
      case Section::transitions: {
        if (fields.size() != kCategories + 1) reader.fail("expected a state name and 4 log-probs");
        std::size_t row = kRowNames.size();
        for (std::size_t r = 0; r < kRowNames.size(); ++r) {
          if (fields[0] == kRowNames[r]) row = r;
        }
        if (row == kRowNames.size()) reader.fail("unknown state '" + std::string(fields[0]) + "'");
        for (std::size_t c = 0; c < kCategories; ++c) {
          m.categories->log_transitions[row][c] = parse_double(fields[c + 1], reader);
        }
        ++rows_seen;
        break;
      }
      case Section::emissions: {
        if (fields.size() != kCategories + 1 || fields[0].empty()) {
          reader.fail("expected a morph and 4 log-probs");
        }
        std::array<double, kCategories> logs{};
        for (std::size_t c = 0; c < kCategories; ++c) logs[c] = parse_double(fields[c + 1], reader);
        m.categories->log_emissions.emplace(std::string(fields[0]), logs);
        break;
      }
    }
  }
  if (m.variant == MorfVariant::flatcat && (!m.categories || rows_seen != kRowNames.size())) {
    reader.fail("flatcat model lacks a complete category block");
  }
  if (m.lexicon.empty()) reader.fail("empty lexicon");
  try {
    check_consistent(m);
  } catch (const DataError& e) {
    reader.fail(e.what());
  }
  return m;
}

CrfModel read_crf_body(LineReader& reader, const std::vector<std::string_view>& header) {
  if (header.size() != 4) reader.fail("expected 'crf v1 <delta> <l2>'");
  CrfModel model(static_cast<std::size_t>(parse_uint(header[2], reader)),
                 parse_double(header[3], reader));
  bool in_transitions = false;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line == "transitions:") {
      in_transitions = true;
      continue;
    }
    const auto fields = split_on(line, '\t');
    if (fields.size() != 3) reader.fail("expected three TAB-separated fields");
    auto tag = [&](std::string_view s) {
      if (s.size() != 1) reader.fail("bad tag '" + std::string(s) + "'");
      try {
        return parse_tag(s[0]);
      } catch (const DataError& e) {
        reader.fail(e.what());
      }
    };
    const double w = parse_double(fields[2], reader);
    if (in_transitions) {
      try {
        model.set_transition(tag(fields[0]), tag(fields[1]), w);
      } catch (const DataError& e) {
        reader.fail(e.what());
      }
    } else {
      model.set_weight(model.intern(std::string(fields[0])), tag(fields[1]), w);
    }
  }
  return model;
}

}  // namespace

void write_bpe_model(std::ostream& out, const BpeModel& model) {
  out << "bpe v1 " << model.target_vocab_size() << ' ' << model.marker() << '\n';
  for (const auto& [l, r] : model.merges()) out << l << '\t' << r << '\n';
  out << "alphabet:\n";
  for (const auto& s : model.initial_symbols()) out << s << '\n';
}

void write_morf_model(std::ostream& out, const MorfModel& model) {
  out << "morf v1 " << to_string(model.variant) << ' ' << report::format_real(model.alpha);
  if (model.max_lexicon_size) out << ' ' << *model.max_lexicon_size;
  out << '\n';
  for (const auto& [morph, count] : model.lexicon) {
    if (count > 0) out << morph << '\t' << count << '\n';
  }
  if (model.variant != MorfVariant::flatcat || !model.categories) return;
  const auto& cm = *model.categories;
  out << "transitions:\n";
  for (std::size_t r = 0; r < kRowNames.size(); ++r) {
    out << kRowNames[r];
    for (double v : cm.log_transitions[r]) out << '\t' << report::format_real(v);
    out << '\n';
  }
  out << "emissions:\n";
  for (const auto& [morph, logs] : cm.log_emissions) {
    out << morph;
    for (double v : logs) out << '\t' << report::format_real(v);
    out << '\n';
  }
}

void write_crf_model(std::ostream& out, const CrfModel& model) {
  out << "crf v1 " << model.delta() << ' ' << report::format_real(model.l2()) << '\n';
  std::vector<std::size_t> order(model.num_features());
  for (std::size_t f = 0; f < order.size(); ++f) order[f] = f;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return model.feature_name(a) < model.feature_name(b);
  });
  for (std::size_t f : order) {
    for (std::size_t t = 0; t < kTags; ++t) {
      const double w = model.weight(f, static_cast<Tag>(t));
      if (w != 0.0) {
        out << model.feature_name(f) << '\t' << tag_char(static_cast<Tag>(t)) << '\t'
            << report::format_real(w) << '\n';
      }
    }
  }
  out << "transitions:\n";
  for (std::size_t a = 0; a < kTags; ++a) {
    for (std::size_t b = 0; b < kTags; ++b) {
      if (!tag_transition_allowed(static_cast<Tag>(a), static_cast<Tag>(b))) continue;
      out << tag_char(static_cast<Tag>(a)) << '\t' << tag_char(static_cast<Tag>(b)) << '\t'
          << report::format_real(model.transition(static_cast<Tag>(a), static_cast<Tag>(b)))
          << '\n';
    }
  }
}

void write_model(std::ostream& out, const AnyModel& model) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BpeModel>) {
          write_bpe_model(out, m);
        } else if constexpr (std::is_same_v<T, MorfModel>) {
          write_morf_model(out, m);
        } else {
          write_crf_model(out, m);
        }
      },
      model);
}

AnyModel read_model(std::istream& in, std::string_view name) {
  LineReader reader(in, name);
  std::string header;
  if (!reader.next(header)) reader.fail("empty model file");
  const auto fields = split_on(header, ' ');
  if (fields.size() < 2 || fields[1] != "v1") reader.fail("unrecognized model header");
  if (fields[0] == "bpe") return read_bpe_body(reader, fields);
  if (fields[0] == "morf") return read_morf_body(reader, fields);
  if (fields[0] == "crf") return read_crf_body(reader, fields);
  reader.fail("unknown model family '" + std::string(fields[0]) + "'");
}

void save_model(const std::filesystem::path& path, const AnyModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file '" + path.string() + "'");
  write_model(out, model);
  if (!out) throw DataError("failed writing model file '" + path.string() + "'");
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  return read_model(in, path.string());
}

}  // namespace polyseg
