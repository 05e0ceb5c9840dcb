#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <variant>

#include "polyseg/bpe.hpp"
#include "polyseg/crf.hpp"
#include "polyseg/morfessor.hpp"

namespace polyseg {

using AnyModel = std::variant<BpeModel, MorfModel, CrfModel>;

void write_bpe_model(std::ostream& out, const BpeModel& model);
void write_morf_model(std::ostream& out, const MorfModel& model);
void write_crf_model(std::ostream& out, const CrfModel& model);
void write_model(std::ostream& out, const AnyModel& model);

// Dispatches on the header line. Errors carry `name` and the line number.
AnyModel read_model(std::istream& in, std::string_view name = "<model>");

void save_model(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_model(const std::filesystem::path& path);

}  // namespace polyseg
