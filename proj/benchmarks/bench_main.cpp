#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "seafarer/acquisition.hpp"
#include "seafarer/classifier.hpp"
#include "seafarer/corpus.hpp"
#include "seafarer/linucb.hpp"
#include "seafarer/metrics.hpp"
#include "seafarer/random.hpp"
#include "seafarer/retrieval.hpp"
#include "seafarer/search.hpp"

namespace {

using namespace seafarer;

void BM_RocAuc(benchmark::State& state) {
  Rng rng(1);
  std::vector<ScoredLabel> data(static_cast<std::size_t>(state.range(0)));
  for (auto& d : data) {
    d.score = rng.normal();
    d.label = rng.uniform01() < 0.1 ? 1 : 0;
  }
  data.front().label = 1;
  data.back().label = 0;
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->RangeMultiplier(10)->Range(1000, 1000000);

void BM_LinUcbSelect(benchmark::State& state) {
  const std::size_t arms = static_cast<std::size_t>(state.range(0));
  const std::size_t k = 16;
  Rng rng(2);
  std::vector<double> contexts(arms * k);
  for (auto& v : contexts) v = rng.normal();
  LinUcb bandit(k, 1.0, 1.0);
  for (std::size_t i = 0; i < 50; ++i)
    bandit.update(std::span<const double>(contexts).subspan((i % arms) * k, k), rng.uniform01());
  for (auto _ : state) benchmark::DoNotOptimize(bandit.select(contexts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LinUcbSelect)->Arg(100)->Arg(1000)->Arg(10000);

void BM_LinUcbUpdate(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<double> z(k);
  for (auto& v : z) v = rng.normal();
  LinUcb bandit(k, 1.0, 1.0);
  for (auto _ : state) bandit.update(z, 0.5);
}
BENCHMARK(BM_LinUcbUpdate)->Arg(8)->Arg(16)->Arg(64);

void BM_Train(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 16;
  Rng rng(4);
  std::vector<std::vector<double>> features(n, std::vector<double>(d));
  std::vector<TrainingExample> examples(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : features[i]) v = rng.normal() + (i % 2 ? 1.0 : -1.0);
    examples[i] = {features[i], static_cast<int>(i % 2)};
  }
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(train(examples, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * cfg.epochs);
}
BENCHMARK(BM_Train)->Arg(10)->Arg(100)->Arg(1000);

void BM_SeafaringSelect(benchmark::State& state) {
  SynthParams params;
  params.n_items = 20000;
  params.n_tags = 100;
  params.d = 16;
  params.k = 8;
  params.seed = 7;
  params.cluster_spread = 0.5;
  auto [corpus, embeddings] = synth_corpus(params);
  CorpusSearch source(std::make_shared<const Corpus>(std::move(corpus)));
  Rng rng(5);
  std::vector<double> w(params.d);
  for (auto& v : w) v = rng.normal();
  const BinaryClassifier model(w, 0.0, true);
  RetrievalConfig cfg;
  cfg.linucb_iters = static_cast<std::size_t>(state.range(0));
  const AcquisitionConfig acq;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(seafaring_select(source, embeddings, model, acq, cfg, {}, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SeafaringSelect)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
