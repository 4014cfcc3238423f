#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seafarer/acquisition.hpp"
#include "seafarer/classifier.hpp"
#include "seafarer/corpus.hpp"
#include "seafarer/random.hpp"
#include "seafarer/search.hpp"

namespace seafarer {

enum class Strategy { seafaring, small_exact, random };
enum class RewardAggregation { mean, max };

std::string_view to_string(Strategy s) noexcept;
Strategy strategy_from_string(std::string_view name);
std::string_view to_string(RewardAggregation a) noexcept;
RewardAggregation reward_aggregation_from_string(std::string_view name);

inline constexpr std::size_t kSimulatedLinUcbIters = 1000;
inline constexpr std::size_t kRemoteLinUcbIters = 100;

struct RetrievalConfig {
  Strategy strategy = Strategy::seafaring;
  std::size_t linucb_iters = kSimulatedLinUcbIters;
  std::size_t page_size = 10;
  double alpha = 1.0;
  double lambda = 1.0;
  RewardAggregation reward_agg = RewardAggregation::mean;
  std::size_t small_pool_size = 1000;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const RetrievalConfig&, const RetrievalConfig&) = default;
};

struct SelectionReport {
  Item chosen;
  double chosen_score = 0.0;
  double chosen_p1 = 0.0;
  std::size_t n_model_evals = 0;
  std::size_t n_queries = 0;
  double max_pos_prob_seen = 0.0;
  std::map<std::string, std::size_t> per_tag_pulls;
  /// Tags in the order they were queried (seafaring and remote random).
  std::vector<std::string> pull_sequence;
};

/// Tag-bandit search for the item maximising the acquisition score.
///
/// Runs `cfg.linucb_iters` rounds of: pick the max-UCB tag (ties to the
/// lexicographically first), query `page_size` results with a token derived
/// from `selection_seed` and the round, score the items not yet seen in this
/// call and not excluded, reward the tag with the aggregated scores mapped to
/// [0, 1] (0 when nothing new came back), and update the bandit. A fresh
/// bandit is used on every call.
///
/// Throws SelectionError if no item could be scored at all.
SelectionReport seafaring_select(SearchSource& source, const TagEmbeddings& embeddings,
                                 const BinaryClassifier& model, const AcquisitionConfig& acq,
                                 const RetrievalConfig& cfg, const IdSet& exclude,
                                 std::uint64_t selection_seed);

struct SmallPool {
  std::vector<Item> items;
  std::size_t requested = 0;
  bool shortfall = false;  // fewer than `requested` items were available
};

/// Seeded uniform sample without replacement of `size` items from
/// `candidates` (all of them, flagged as a shortfall, when there are fewer).
SmallPool small_exact_init(std::span<const Item> candidates, std::size_t size, std::uint64_t seed);
/// Same over a corpus, skipping `exclude` (e.g. held-out test items).
SmallPool small_exact_init(const Corpus& corpus, std::size_t size, std::uint64_t seed,
                           const IdSet& exclude = {});
/// Remote variant: gathers distinct items through random-tag queries.
SmallPool small_exact_init(SearchSource& source, std::size_t size, std::size_t page_size,
                           std::uint64_t seed, const IdSet& exclude = {});

/// Exhaustive argmax over the non-excluded pool items.
SelectionReport small_exact_select(const SmallPool& pool, const BinaryClassifier& model,
                                   const AcquisitionConfig& acq, const IdSet& exclude);

inline constexpr int kRandomRemoteRetries = 50;

/// Uniform pick among the corpus items not in `exclude`. The model is only
/// evaluated on the chosen item, for reporting.
SelectionReport random_select(const Corpus& corpus, Rng& rng, const IdSet& exclude,
                              const BinaryClassifier& model, const AcquisitionConfig& acq);
/// Remote variant: uniform random tag, one query, uniform non-excluded
/// result; up to kRandomRemoteRetries attempts on empty results.
SelectionReport random_select(SearchSource& source, Rng& rng, std::size_t page_size,
                              const IdSet& exclude, const BinaryClassifier& model,
                              const AcquisitionConfig& acq);

}  // namespace seafarer
