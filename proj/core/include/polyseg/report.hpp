#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// Locale-independent number rendering for reports and model files.
namespace polyseg::report {

enum class Rounding { half_up, truncate };

// Renders num/den with exactly `places` decimals, computed in integer
// arithmetic so that table cells never depend on binary floating point.
std::string format_ratio(std::uint64_t num, std::uint64_t den, int places,
                         Rounding rounding = Rounding::half_up);

std::string format_fixed(double value, int places);

// Shortest representation that round-trips through parse_real.
std::string format_real(double value);

// Accepts everything format_real emits, including "inf" and "-inf".
double parse_real(std::string_view s);

}  // namespace polyseg::report
