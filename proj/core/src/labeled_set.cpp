#include "seafarer/labeled_set.hpp"

#include <algorithm>

#include "seafarer/error.hpp"

namespace seafarer {

void LabeledSet::add(std::string item_id, int label) {
  if (label != 0 && label != 1) {
    throw ValidationError("label for " + item_id + " must be 0 or 1, got " + std::to_string(label));
  }
  if (!ids_.insert(item_id).second) throw ValidationError("item " + item_id + " is already labeled");
  n_pos_ += static_cast<std::size_t>(label);
  entries_.push_back({std::move(item_id), label});
}

bool LabeledSet::contains(std::string_view item_id) const {
  return ids_.find(std::string(item_id)) != ids_.end();
}

double LabeledSet::neg_pos_ratio() const noexcept {
  return static_cast<double>(n_neg()) / static_cast<double>(std::max<std::size_t>(n_pos_, 1));
}

}  // namespace seafarer
