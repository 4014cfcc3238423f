#include "seafarer/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "seafarer/error.hpp"
#include "seafarer/linucb.hpp"

namespace seafarer {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::seafaring: return "seafaring";
    case Strategy::small_exact: return "small_exact";
    case Strategy::random: return "random";
  }
  return "seafaring";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "seafaring") return Strategy::seafaring;
  if (name == "small_exact") return Strategy::small_exact;
  if (name == "random") return Strategy::random;
  throw ValidationError("unknown strategy: " + std::string(name));
}

std::string_view to_string(RewardAggregation a) noexcept {
  return a == RewardAggregation::max ? "max" : "mean";
}

RewardAggregation reward_aggregation_from_string(std::string_view name) {
  if (name == "mean") return RewardAggregation::mean;
  if (name == "max") return RewardAggregation::max;
  throw ValidationError("unknown reward aggregation: " + std::string(name));
}

void RetrievalConfig::validate() const {
  if (linucb_iters < 1) throw ValidationError("retrieval.linucb_iters must be >= 1");
  if (page_size < 1) throw ValidationError("retrieval.page_size must be >= 1");
  if (small_pool_size < 1) throw ValidationError("retrieval.small_pool_size must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("retrieval.alpha must be finite and >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("retrieval.lambda must be finite and > 0");
}

namespace {

void consider(SelectionReport& report, bool& have_best, const Item& item, double s, double p1) {
  if (!have_best || better_candidate(s, item.id, report.chosen_score, report.chosen.id)) {
    report.chosen = item;
    report.chosen_score = s;
    report.chosen_p1 = p1;
    have_best = true;
  }
}

}  // namespace

SelectionReport seafaring_select(SearchSource& source, const TagEmbeddings& embeddings,
                                 const BinaryClassifier& model, const AcquisitionConfig& acq,
                                 const RetrievalConfig& cfg, const IdSet& exclude,
                                 std::uint64_t selection_seed) {
  cfg.validate();
  const std::vector<std::string> vocab = source.vocabulary();
  if (vocab.empty()) throw SelectionError("seafaring: the search source has an empty vocabulary");

  const std::size_t k = embeddings.dim();
  std::vector<double> contexts;
  contexts.reserve(vocab.size() * k);
  for (const auto& tag : vocab) {
    const auto z = embeddings.lookup(tag);
    contexts.insert(contexts.end(), z.begin(), z.end());
  }

  LinUcb bandit(k, cfg.alpha, cfg.lambda);
  SelectionReport report;
  bool have_best = false;
  std::unordered_set<std::string> seen;

  for (std::size_t round = 0; round < cfg.linucb_iters; ++round) {
    const std::size_t arm = bandit.select(contexts);
    const std::string& tag = vocab[arm];
    const auto results = source.search(tag, cfg.page_size, derive_seed(selection_seed, round));
    ++report.n_queries;
    ++report.per_tag_pulls[tag];
    report.pull_sequence.push_back(tag);

    double agg = 0.0;
    std::size_t fresh = 0;
    for (const auto& item : results) {
      if (exclude.count(item.id) || !seen.insert(item.id).second) continue;
      const auto proba = model.predict_proba(item.features);
      const double s = score(acq, proba);
      ++report.n_model_evals;
      report.max_pos_prob_seen = std::max(report.max_pos_prob_seen, proba.p1);
      consider(report, have_best, item, s, proba.p1);
      const double r = normalized_reward(acq, s);
      agg = cfg.reward_agg == RewardAggregation::max ? (fresh == 0 ? r : std::max(agg, r)) : agg + r;
      ++fresh;
    }
    double reward = 0.0;
    if (fresh > 0) reward = cfg.reward_agg == RewardAggregation::mean ? agg / static_cast<double>(fresh) : agg;
    bandit.update(std::span<const double>(contexts).subspan(arm * k, k), reward);
  }

  if (!have_best) {
    throw SelectionError("seafaring: no selectable item was retrieved in " +
                         std::to_string(cfg.linucb_iters) + " rounds");
  }
  return report;
}

SmallPool small_exact_init(std::span<const Item> candidates, std::size_t size, std::uint64_t seed) {
  if (candidates.empty()) throw SelectionError("small_exact_init: the source is empty");
  SmallPool pool;
  pool.requested = size;
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(size, order.size());
  pool.shortfall = take < size;
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(order.size() - i));
    std::swap(order[i], order[j]);
  }
  pool.items.reserve(take);
  for (std::size_t i = 0; i < take; ++i) pool.items.push_back(candidates[order[i]]);
  return pool;
}

SmallPool small_exact_init(const Corpus& corpus, std::size_t size, std::uint64_t seed,
                           const IdSet& exclude) {
  if (exclude.empty()) return small_exact_init(corpus.items(), size, seed);
  std::vector<Item> candidates;
  candidates.reserve(corpus.size());
  for (const auto& item : corpus.items())
    if (!exclude.count(item.id)) candidates.push_back(item);
  return small_exact_init(candidates, size, seed);
}

SmallPool small_exact_init(SearchSource& source, std::size_t size, std::size_t page_size,
                           std::uint64_t seed, const IdSet& exclude) {
  const auto vocab = source.vocabulary();
  if (vocab.empty()) throw SelectionError("small_exact_init: the source has an empty vocabulary");
  SmallPool pool;
  pool.requested = size;
  Rng rng(seed);
  std::unordered_set<std::string> have;
  const std::size_t max_queries = std::max<std::size_t>(50, 4 * (size / std::max<std::size_t>(page_size, 1) + 1));
  for (std::size_t q = 0; q < max_queries && pool.items.size() < size; ++q) {
    const auto& tag = vocab[rng.uniform_index(vocab.size())];
    for (auto& item : source.search(tag, page_size, rng.next_u64())) {
      if (pool.items.size() >= size) break;
      if (exclude.count(item.id) || !have.insert(item.id).second) continue;
      pool.items.push_back(std::move(item));
    }
  }
  if (pool.items.empty()) throw SelectionError("small_exact_init: the source returned no items");
  pool.shortfall = pool.items.size() < size;
  return pool;
}

SelectionReport small_exact_select(const SmallPool& pool, const BinaryClassifier& model,
                                   const AcquisitionConfig& acq, const IdSet& exclude) {
  SelectionReport report;
  bool have_best = false;
  for (const auto& item : pool.items) {
    if (exclude.count(item.id)) continue;
    const auto proba = model.predict_proba(item.features);
    const double s = score(acq, proba);
    ++report.n_model_evals;
    report.max_pos_prob_seen = std::max(report.max_pos_prob_seen, proba.p1);
    consider(report, have_best, item, s, proba.p1);
  }
  if (!have_best) throw SelectionError("small_exact: the pool is exhausted");
  return report;
}

namespace {

SelectionReport report_for(const Item& item, const BinaryClassifier& model, const AcquisitionConfig& acq) {
  SelectionReport report;
  const auto proba = model.predict_proba(item.features);
  report.chosen = item;
  report.chosen_score = score(acq, proba);
  report.chosen_p1 = proba.p1;
  report.n_model_evals = 1;
  report.max_pos_prob_seen = proba.p1;
  return report;
}

}  // namespace

SelectionReport random_select(const Corpus& corpus, Rng& rng, const IdSet& exclude,
                              const BinaryClassifier& model, const AcquisitionConfig& acq) {
  std::vector<std::size_t> open;
  open.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (!exclude.count(corpus.at(i).id)) open.push_back(i);
  if (open.empty()) throw SelectionError("random: every item is excluded");
  return report_for(corpus.at(open[rng.uniform_index(open.size())]), model, acq);
}

SelectionReport random_select(SearchSource& source, Rng& rng, std::size_t page_size,
                              const IdSet& exclude, const BinaryClassifier& model,
                              const AcquisitionConfig& acq) {
  const auto vocab = source.vocabulary();
  if (vocab.empty()) throw SelectionError("random: the source has an empty vocabulary");
  std::size_t queries = 0;
  std::map<std::string, std::size_t> pulls;
  std::vector<std::string> sequence;
  for (int attempt = 0; attempt < kRandomRemoteRetries; ++attempt) {
    const auto& tag = vocab[rng.uniform_index(vocab.size())];
    auto results = source.search(tag, page_size, rng.next_u64());
    ++queries;
    ++pulls[tag];
    sequence.push_back(tag);
    std::vector<const Item*> open;
    for (const auto& item : results)
      if (!exclude.count(item.id)) open.push_back(&item);
    if (open.empty()) continue;
    auto report = report_for(*open[rng.uniform_index(open.size())], model, acq);
    report.n_queries = queries;
    report.per_tag_pulls = std::move(pulls);
    report.pull_sequence = std::move(sequence);
    return report;
  }
  throw SelectionError("random: no selectable item after " + std::to_string(kRandomRemoteRetries) +
                       " queries");
}

}  // namespace seafarer
