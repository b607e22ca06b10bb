#pragma once

#include <string>

namespace treepca {

// Fixed output precision for every numeric value the tools write.
inline constexpr int kOutputDigits = 12;

// "%.12g", locale independent.
std::string format_number(double value);

// Rounds to 12 significant digits, so JSON serialisation is stable.
double round_significant(double value);

}  // namespace treepca
