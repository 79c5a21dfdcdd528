#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "specstat/errors.hpp"

namespace specstat {

enum class SpectrumKind { line, circle };

/// Ordered list of levels: energies on the real line, or phases in [0, 2pi)
/// for kind == circle. Levels are non-decreasing and finite.
struct Spectrum {
  std::vector<double> levels;
  SpectrumKind kind = SpectrumKind::line;

  std::size_t size() const { return levels.size(); }

  double width() const { return levels.back() - levels.front(); }

  void validate() const {
    if (levels.empty()) throw TooFewLevelsError("spectrum is empty");
    double prev = -std::numeric_limits<double>::infinity();
    for (double v : levels) {
      if (!std::isfinite(v)) throw NonFiniteError("spectrum contains a non-finite level");
      if (v < prev) throw ConfigError("spectrum levels are not sorted");
      prev = v;
    }
  }
};

}  // namespace specstat
