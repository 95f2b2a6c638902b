#ifndef SHUTTLESIM_SRC_CSV_HPP
#define SHUTTLESIM_SRC_CSV_HPP

// Field-level helpers shared by the dataset loader and the record reader.
// Files are plain comma-separated text without quoting.

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "shuttlesim/calibration.hpp"

namespace shuttlesim::csv {

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline double to_double(std::string_view s, std::size_t line, std::string_view field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(line, std::string(field), "not a finite number: '" + std::string(s) + "'");
  }
  return v;
}

inline int to_int(std::string_view s, std::size_t line, std::string_view field) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, std::string(field), "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace shuttlesim::csv

#endif  // SHUTTLESIM_SRC_CSV_HPP
