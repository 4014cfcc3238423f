#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seafarer/config.hpp"
#include "seafarer/corpus.hpp"
#include "seafarer/engine.hpp"
#include "seafarer/metrics.hpp"
#include "seafarer/search.hpp"

namespace seafarer {

/// Command-line overrides layered over a config file.
struct ExperimentOverrides {
  std::optional<Strategy> strategy;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::string> endpoint;  // switches the source to remote
  std::optional<std::uint64_t> query_cap;
};

ExperimentConfig apply_overrides(ExperimentConfig cfg, const ExperimentOverrides& overrides);

/// Corpus and tag embeddings an experiment runs over.
struct Workspace {
  std::shared_ptr<const Corpus> corpus;
  std::shared_ptr<const TagEmbeddings> embeddings;
};

/// Loads or synthesises the corpus, then the embeddings: from file, from the
/// synthetic generator, or an empty table falling back to the default policy.
Workspace load_workspace(const ExperimentConfig& cfg);

/// Resolves `task.target_positive_rate` to a concrete tag.
TaskSpec resolve_task(const ExperimentConfig& cfg, const Corpus& corpus);

/// The task of a run: the test split and initial pair depend only on the
/// seed, so every strategy sees the same task for a seed.
Task build_run_task(const ExperimentConfig& cfg, const Workspace& ws, std::uint64_t seed);

/// Settings for one run of `strategy` with `seed`.
RunSettings run_settings(const ExperimentConfig& cfg, Strategy strategy, std::uint64_t seed);

/// The search source the learner uses: the corpus itself, or a remote
/// endpoint sharing one query budget across runs.
std::unique_ptr<SearchSource> make_source(const ExperimentConfig& cfg, const Workspace& ws,
                                          std::shared_ptr<SearchBudgetMeter> meter = nullptr);

/// One simulated-oracle run over build_run_task(cfg, ws, seed).
RunRecord run_one(const ExperimentConfig& cfg, const Workspace& ws, SearchSource& source,
                  Strategy strategy, std::uint64_t seed, const RunHooks& hooks = {});

std::filesystem::path run_csv_path(const std::filesystem::path& out, Strategy strategy, std::uint64_t seed);

struct StrategyOutcome {
  Strategy strategy;
  std::vector<RunRecord> records;
  std::optional<Summary> summary;  // absent when every run failed
};

struct ExperimentOutcome {
  std::vector<StrategyOutcome> strategies;
  std::vector<std::string> failures;
  bool ok() const noexcept { return failures.empty(); }
};

using ProgressFn = std::function<void(const std::string&)>;

/// Runs every (strategy, seed) pair and writes
///   <out>/<strategy>/seed_<n>.csv (+ .config.json)
///   <out>/summary_<strategy>.csv
///   <out>/summary.csv  (one `# strategy=<name>` block per strategy)
///   <out>/config.json
/// A failed run is reported in `failures` and the rest continue.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// Groups run CSVs below `dir` by their parent directory name and
/// summarises each group.
std::vector<std::pair<std::string, Summary>> summarize_directory(const std::filesystem::path& dir);

/// Writes blocks in the `# strategy=<name>` layout.
void write_summary_blocks(const std::vector<std::pair<std::string, Summary>>& blocks,
                          const std::filesystem::path& path);

}  // namespace seafarer
