#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "seafarer/corpus.hpp"
#include "seafarer/labeled_set.hpp"
#include "seafarer/oracle.hpp"

namespace seafarer {

enum class TaskKind { tag, similarity };

std::string_view to_string(TaskKind kind) noexcept;
TaskKind task_kind_from_string(std::string_view name);

struct TaskSpec {
  TaskKind kind = TaskKind::tag;
  std::string tag;
  double tau = 0.8;
  double test_fraction = 0.2;
  std::size_t n_references = 10;

  void validate() const;
  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// A binary task over a corpus: the simulated oracle, the initial labeled
/// pair given to the learner, and the evaluator's held-out test set.
struct Task {
  TaskSpec spec;
  std::unique_ptr<Oracle> oracle;
  std::vector<Item> initial_items;  // one positive, one negative
  LabeledSet initial;
  std::vector<Item> test_items;  // corpus order
  std::vector<int> test_labels;
  /// Ids of the similarity references (evaluator-side only).
  std::vector<std::string> reference_ids;

  std::size_t test_positives() const;
};

/// Splits off a stratified test set (at least one positive and one negative,
/// and at least one of each left over) and draws the initial pair from the
/// remainder. For similarity tasks the references are drawn from items
/// carrying `spec.tag`. Throws ValidationError when the task has fewer than
/// two positives or two negatives.
Task build_task(const Corpus& corpus, const TaskSpec& spec, std::uint64_t seed);

/// The tag whose posting-list share of the corpus is closest to `rate`
/// (ties to the lexicographically smaller tag).
std::string tag_for_positive_rate(const Corpus& corpus, double rate);

}  // namespace seafarer
