#pragma once

#include <string>
#include <vector>

#include "trustcascade/error.hpp"

namespace trustcascade {

/// Values indexed by 1-based node position, starting at `first`.
struct IndexedSeries {
  int first = 1;
  std::vector<double> values;

  int last() const noexcept { return first + static_cast<int>(values.size()) - 1; }
  bool has(int i) const noexcept { return i >= first && i <= last(); }
  double at(int i) const {
    require(has(i), ErrorCode::Contract,
            "index " + std::to_string(i) + " outside [" + std::to_string(first) + ", " +
                std::to_string(last()) + "]");
    return values[static_cast<std::size_t>(i - first)];
  }
  double& at(int i) {
    require(has(i), ErrorCode::Contract,
            "index " + std::to_string(i) + " outside [" + std::to_string(first) + ", " +
                std::to_string(last()) + "]");
    return values[static_cast<std::size_t>(i - first)];
  }

  static IndexedSeries range(int first, int last) {
    return IndexedSeries{first, std::vector<double>(last >= first ? static_cast<std::size_t>(last - first + 1) : 0, 0.0)};
  }
};

}  // namespace trustcascade
