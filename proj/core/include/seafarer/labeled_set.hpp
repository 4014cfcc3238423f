#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace seafarer {

struct LabeledEntry {
  std::string item_id;
  int label = 0;  // 0 or 1
  friend bool operator==(const LabeledEntry&, const LabeledEntry&) = default;
};

/// Ordered (item id, binary label) pairs with no duplicate ids.
class LabeledSet {
 public:
  /// Throws ValidationError on a duplicate id or a label outside {0, 1}.
  void add(std::string item_id, int label);

  bool contains(std::string_view item_id) const;
  const std::vector<LabeledEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t n_pos() const noexcept { return n_pos_; }
  std::size_t n_neg() const noexcept { return entries_.size() - n_pos_; }
  /// n_neg / max(n_pos, 1)
  double neg_pos_ratio() const noexcept;

  friend bool operator==(const LabeledSet& a, const LabeledSet& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<LabeledEntry> entries_;
  std::unordered_set<std::string> ids_;
  std::size_t n_pos_ = 0;
};

}  // namespace seafarer
