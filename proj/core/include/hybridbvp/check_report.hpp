#pragma once

#include <string>
#include <vector>

namespace hybridbvp {

/// Outcome of one sampled or exact condition check.
struct CheckItem {
  std::string name;
  bool passed = true;
  /// Smallest observed slack (negative when violated).
  double worst_margin = 0.0;
  /// Where the worst margin was observed.
  std::string witness;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckItem> items;

  bool passed() const noexcept {
    for (const auto& item : items) {
      if (!item.passed) return false;
    }
    return true;
  }
  void append(const CheckReport& other) {
    items.insert(items.end(), other.items.begin(), other.items.end());
  }
};

}  // namespace hybridbvp
