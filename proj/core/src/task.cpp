#include "seafarer/task.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seafarer/error.hpp"
#include "seafarer/random.hpp"

namespace seafarer {

std::string_view to_string(TaskKind kind) noexcept {
  return kind == TaskKind::similarity ? "similarity" : "tag";
}

TaskKind task_kind_from_string(std::string_view name) {
  if (name == "tag") return TaskKind::tag;
  if (name == "similarity") return TaskKind::similarity;
  throw ValidationError("unknown task kind: " + std::string(name));
}

void TaskSpec::validate() const {
  if (tag.empty()) throw ValidationError("task.tag must be non-empty");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("task.test_fraction must be in (0, 1)");
  if (kind == TaskKind::similarity) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("task.tau must be in (0, 1]");
    if (n_references < 1) throw ValidationError("task.n_references must be >= 1");
  }
}

std::size_t Task::test_positives() const {
  return static_cast<std::size_t>(std::count(test_labels.begin(), test_labels.end(), 1));
}

Task build_task(const Corpus& corpus, const TaskSpec& spec, std::uint64_t seed) {
  spec.validate();
  Task task;
  task.spec = spec;

  if (spec.kind == TaskKind::tag) {
    task.oracle = std::make_unique<TagOracle>(spec.tag);
  } else {
    std::vector<std::size_t> bearers(corpus.postings(spec.tag).begin(), corpus.postings(spec.tag).end());
    if (bearers.empty()) throw ValidationError("no item carries tag " + spec.tag + " to serve as a reference");
    Rng ref_rng(derive_seed(seed, 0x4ef5ULL));
    ref_rng.shuffle(std::span<std::size_t>(bearers));
    bearers.resize(std::min(bearers.size(), spec.n_references));
    std::sort(bearers.begin(), bearers.end());
    std::vector<std::vector<double>> refs;
    for (std::size_t i : bearers) {
      refs.push_back(corpus.at(i).features);
      task.reference_ids.push_back(corpus.at(i).id);
    }
    task.oracle = std::make_unique<SimilarityOracle>(std::move(refs), spec.tau);
  }

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    (task.oracle->label(corpus.at(i)) ? pos : neg).push_back(i);
  if (pos.size() < 2 || neg.size() < 2) {
    throw ValidationError("task on tag " + spec.tag + " has " + std::to_string(pos.size()) +
                          " positives and " + std::to_string(neg.size()) +
                          " negatives; at least 2 of each are required");
  }

  Rng rng(derive_seed(seed, 0x7e57ULL));
  rng.shuffle(std::span<std::size_t>(pos));
  rng.shuffle(std::span<std::size_t>(neg));

  auto share = [&](std::size_t n) {
    const auto want = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(want, 1, n - 1);
  };
  const std::size_t n_test_pos = share(pos.size());
  const std::size_t n_test_neg = share(neg.size());

  std::vector<std::size_t> test(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_test_pos));
  test.insert(test.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(n_test_neg));
  std::sort(test.begin(), test.end());
  for (std::size_t i : test) {
    task.test_items.push_back(corpus.at(i));
    task.test_labels.push_back(task.oracle->label(corpus.at(i)));
  }

  const std::size_t first_pos = pos[n_test_pos + rng.uniform_index(pos.size() - n_test_pos)];
  const std::size_t first_neg = neg[n_test_neg + rng.uniform_index(neg.size() - n_test_neg)];
  for (std::size_t i : {first_pos, first_neg}) {
    const Item& item = corpus.at(i);
    task.initial_items.push_back(item);
    task.initial.add(item.id, task.oracle->label(item));
  }
  return task;
}

std::string tag_for_positive_rate(const Corpus& corpus, double rate) {
  const auto& vocab = corpus.tag_vocab();
  if (vocab.empty()) throw ValidationError("corpus has no tags");
  std::string best;
  double best_gap = 0.0;
  for (const auto& tag : vocab) {
    const double share = static_cast<double>(corpus.postings(tag).size()) / static_cast<double>(corpus.size());
    const double gap = std::abs(share - rate);
    if (best.empty() || gap < best_gap) {
      best = tag;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace seafarer
