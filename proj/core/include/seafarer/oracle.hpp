#pragma once

#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seafarer/corpus.hpp"

namespace seafarer {

/// The label source queried once per active-learning iteration.
class Oracle {
 public:
  virtual ~Oracle() = default;
  /// 0 or 1. May block (human mode).
  virtual int label(const Item& item) = 0;
};

/// Positive iff the item carries the target tag.
class TagOracle final : public Oracle {
 public:
  explicit TagOracle(std::string target_tag);
  int label(const Item& item) override;
  const std::string& target_tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

/// a·b / sqrt((a·a)(b·b)); 0 when either vector is zero. Identical non-zero
/// vectors give exactly 1.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Positive iff the best cosine similarity to any reference is >= τ.
class SimilarityOracle final : public Oracle {
 public:
  SimilarityOracle(std::vector<std::vector<double>> references, double threshold);
  int label(const Item& item) override;
  double max_similarity(std::span<const double> features) const;
  double threshold() const noexcept { return threshold_; }
  std::size_t n_references() const noexcept { return references_.size(); }

 private:
  std::vector<std::vector<double>> references_;
  double threshold_;
};

struct PendingLabel {
  Item item;
  std::size_t iteration = 0;  // 1-based
};

struct LabelingStatus {
  std::size_t iteration = 0;  // labels accepted so far
  std::size_t budget = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::vector<double> auc_history;
  bool complete = false;
  std::string error;
};

/// Human-in-the-loop oracle: `label()` publishes the item as pending and
/// blocks until `submit()` delivers a label for exactly that id.
///
/// All state, including the status board read by the labeling service, sits
/// behind one mutex, so a successful submit and the status counters advance
/// together.
class HumanOracle final : public Oracle {
 public:
  enum class SubmitResult { accepted, not_pending, invalid_label, closed };

  HumanOracle() = default;

  int label(const Item& item) override;

  std::optional<PendingLabel> pending() const;
  SubmitResult submit(std::string_view item_id, int label);

  /// Wakes a blocked label() with OracleError and rejects further work.
  void close();
  bool closed() const;

  // Status board maintained alongside the loop.
  void reset_status(std::size_t budget, std::size_t iteration, std::size_t n_pos, std::size_t n_neg,
                    std::vector<double> auc_history);
  void record_auc(double auc);
  void mark_complete();
  void mark_failed(std::string message);
  LabelingStatus status() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::optional<Item> pending_;
  std::optional<int> delivered_;
  bool closed_ = false;
  LabelingStatus status_;
};

}  // namespace seafarer
