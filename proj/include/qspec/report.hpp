#pragma once

// Named pass/fail measurements produced by the verification routines.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qspec {

struct CheckItem {
  std::string name;
  double value{0.0};
  double threshold{0.0};
  bool pass{false};
};

class CheckReport {
 public:
  /// Passes when value <= threshold (NaN fails).
  void add(std::string name, double value, double threshold) {
    const bool ok = value <= threshold;
    items_.push_back({std::move(name), value, threshold, ok});
  }

  /// Records a boolean outcome as value 0 (true) or 1 (false) against threshold 0.
  void require(std::string name, bool ok) { add(std::move(name), ok ? 0.0 : 1.0, 0.0); }

  void merge(const CheckReport& other, const std::string& prefix = {}) {
    for (const auto& it : other.items_) items_.push_back({prefix + it.name, it.value, it.threshold, it.pass});
  }

  bool passed() const {
    for (const auto& it : items_)
      if (!it.pass) return false;
    return true;
  }

  const std::vector<CheckItem>& items() const { return items_; }

  const CheckItem* find(const std::string& name) const {
    for (const auto& it : items_)
      if (it.name == name) return &it;
    return nullptr;
  }

 private:
  std::vector<CheckItem> items_;
};

}  // namespace qspec
