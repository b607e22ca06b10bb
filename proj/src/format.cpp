#include "treepca/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace treepca {

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, kOutputDigits);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

double round_significant(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  const std::string text = format_number(value);
  double out = value;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

}  // namespace treepca
