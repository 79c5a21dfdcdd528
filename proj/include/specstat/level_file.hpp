#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "specstat/errors.hpp"
#include "specstat/spectrum.hpp"

namespace specstat {

/// Parses a level list: one decimal number per line, '#' comment lines and
/// blank lines ignored, surrounding whitespace tolerated. Output is sorted
/// ascending; exact duplicates are rejected (degeneracies must be handled
/// by whatever produced the list, not silently merged here).
inline Spectrum parse_level_file(std::istream& in) {
  std::vector<double> levels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto begin = line.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r\n");
    const std::string token = line.substr(begin, end - begin + 1);
    if (token[0] == '#') continue;

    char* parse_end = nullptr;
    const double value = std::strtod(token.c_str(), &parse_end);
    if (parse_end != token.c_str() + token.size())
      throw ParseError(line_no, "malformed number '" + token + "'");
    if (!std::isfinite(value))
      throw ParseError(line_no, "non-finite level '" + token + "'");
    levels.push_back(value);
  }
  if (levels.empty()) throw TooFewLevelsError("level file contains no levels");

  std::sort(levels.begin(), levels.end());
  for (std::size_t i = 0; i + 1 < levels.size(); ++i)
    if (levels[i] == levels[i + 1]) throw DuplicateLevelError(levels[i]);

  return Spectrum{std::move(levels), SpectrumKind::line};
}

inline Spectrum load_level_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open level file '" + path + "'");
  return parse_level_file(in);
}

}  // namespace specstat
