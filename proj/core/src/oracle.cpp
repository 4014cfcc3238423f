#include "seafarer/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "seafarer/error.hpp"

namespace seafarer {

TagOracle::TagOracle(std::string target_tag) : tag_(std::move(target_tag)) {
  if (tag_.empty()) throw ValidationError("tag oracle needs a non-empty target tag");
}

int TagOracle::label(const Item& item) { return item.has_tag(tag_) ? 1 : 0; }

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("cosine similarity of vectors with different dimensions");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  // For a == b this is d / sqrt(d*d) == 1 exactly.
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

SimilarityOracle::SimilarityOracle(std::vector<std::vector<double>> references, double threshold)
    : references_(std::move(references)), threshold_(threshold) {
  if (references_.empty()) throw ValidationError("similarity oracle needs at least one reference");
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ValidationError("similarity threshold must be in (0, 1]");
  for (const auto& r : references_)
    if (r.size() != references_.front().size())
      throw ValidationError("similarity references have inconsistent dimensions");
}

double SimilarityOracle::max_similarity(std::span<const double> features) const {
  double best = -1.0;
  for (const auto& r : references_) best = std::max(best, cosine_similarity(features, r));
  return best;
}

int SimilarityOracle::label(const Item& item) {
  return max_similarity(item.features) >= threshold_ ? 1 : 0;
}

// ---------------------------------------------------------------------------

int HumanOracle::label(const Item& item) {
  std::unique_lock lock(mutex_);
  if (closed_) throw OracleError("labeling session is closed");
  pending_ = item;
  delivered_.reset();
  cv_.wait(lock, [&] { return delivered_.has_value() || closed_; });
  if (!delivered_) {
    pending_.reset();
    throw OracleError("labeling session closed while waiting for a label on " + item.id);
  }
  const int y = *delivered_;
  delivered_.reset();
  return y;
}

std::optional<PendingLabel> HumanOracle::pending() const {
  std::lock_guard lock(mutex_);
  if (!pending_) return std::nullopt;
  return PendingLabel{*pending_, status_.iteration + 1};
}

HumanOracle::SubmitResult HumanOracle::submit(std::string_view item_id, int label) {
  std::lock_guard lock(mutex_);
  if (closed_) return SubmitResult::closed;
  if (label != 0 && label != 1) return SubmitResult::invalid_label;
  if (!pending_ || pending_->id != item_id) return SubmitResult::not_pending;
  pending_.reset();
  delivered_ = label;
  ++status_.iteration;
  (label == 1 ? status_.n_pos : status_.n_neg) += 1;
  cv_.notify_all();
  return SubmitResult::accepted;
}

void HumanOracle::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool HumanOracle::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

void HumanOracle::reset_status(std::size_t budget, std::size_t iteration, std::size_t n_pos,
                               std::size_t n_neg, std::vector<double> auc_history) {
  std::lock_guard lock(mutex_);
  status_ = LabelingStatus{iteration, budget, n_pos, n_neg, std::move(auc_history), false, {}};
}

void HumanOracle::record_auc(double auc) {
  std::lock_guard lock(mutex_);
  status_.auc_history.push_back(auc);
}

void HumanOracle::mark_complete() {
  std::lock_guard lock(mutex_);
  status_.complete = true;
}

void HumanOracle::mark_failed(std::string message) {
  std::lock_guard lock(mutex_);
  status_.error = std::move(message);
}

LabelingStatus HumanOracle::status() const {
  std::lock_guard lock(mutex_);
  return status_;
}

}  // namespace seafarer
