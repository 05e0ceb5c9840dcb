#include "polyseg/report.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "polyseg/error.hpp"

namespace polyseg::report {
namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

std::string format_ratio(std::uint64_t num, std::uint64_t den, int places,
                         Rounding rounding) {
  if (den == 0) return "nan";
  u128 scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const u128 scaled = static_cast<u128>(num) * scale;
  u128 value = rounding == Rounding::half_up
                                ? (2 * scaled + den) / (2 * static_cast<u128>(den))
                                : scaled / den;
  const auto whole = static_cast<std::uint64_t>(value / scale);
  std::string out = std::to_string(whole);
  if (places > 0) {
    std::string frac = std::to_string(static_cast<std::uint64_t>(value % scale));
    out += '.';
    out.append(static_cast<std::size_t>(places) - frac.size(), '0');
    out += frac;
  }
  return out;
}

std::string format_fixed(double value, int places) {
  return fmt::format("{:.{}f}", value, places);
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw NumericError("cannot format number");
  return std::string(buf.data(), end);
}

double parse_real(std::string_view s) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw DataError("not a number: '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace polyseg::report
