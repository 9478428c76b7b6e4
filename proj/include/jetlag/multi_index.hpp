#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "jetlag/errors.hpp"

namespace jetlag {

/// Symmetric multi-index over base coordinates 1..n, stored as a sorted
/// multiset of coordinate labels. The empty index (order 0) is valid and
/// denotes the dependent variable itself.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    for (int e : entries_)
      if (e < 1) throw ExprError("expr: multi-index entry must be >= 1");
  }

  int order() const noexcept { return static_cast<int>(entries_.size()); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<int>& entries() const noexcept { return entries_; }

  /// Count of a given coordinate in the multiset.
  int count(int i) const noexcept {
    return static_cast<int>(
        std::count(entries_.begin(), entries_.end(), i));
  }

  /// Index with one extra copy of coordinate i.
  MultiIndex append(int i) const {
    if (i < 1) throw ExprError("expr: multi-index entry must be >= 1");
    std::vector<int> e = entries_;
    e.insert(std::upper_bound(e.begin(), e.end(), i), i);
    MultiIndex r;
    r.entries_ = std::move(e);
    return r;
  }

  /// Index with one copy of coordinate i removed; i must be present.
  MultiIndex remove_one(int i) const {
    auto it = std::find(entries_.begin(), entries_.end(), i);
    if (it == entries_.end())
      throw ExprError("expr: multi-index does not contain coordinate " +
                      std::to_string(i));
    std::vector<int> e = entries_;
    e.erase(e.begin() + (it - entries_.begin()));
    MultiIndex r;
    r.entries_ = std::move(e);
    return r;
  }

  /// Total order: by |I| first, then lexicographic on the sorted entries.
  int cmp(const MultiIndex& o) const noexcept {
    if (order() != o.order()) return order() < o.order() ? -1 : 1;
    if (entries_ < o.entries_) return -1;
    if (o.entries_ < entries_) return 1;
    return 0;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) noexcept {
    return a.entries_ == b.entries_;
  }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) noexcept {
    return !(a == b);
  }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) noexcept {
    return a.cmp(b) < 0;
  }

  /// Rendered as "[1,2,2]"; the empty index is "[]".
  std::string str() const {
    std::string s = "[";
    for (size_t j = 0; j < entries_.size(); ++j) {
      if (j) s += ",";
      s += std::to_string(entries_[j]);
    }
    s += "]";
    return s;
  }

 private:
  std::vector<int> entries_;
};

}  // namespace jetlag
