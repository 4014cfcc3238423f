#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seafarer/acquisition.hpp"
#include "seafarer/classifier.hpp"
#include "seafarer/corpus.hpp"
#include "seafarer/oracle.hpp"
#include "seafarer/retrieval.hpp"
#include "seafarer/run_record.hpp"
#include "seafarer/search.hpp"
#include "seafarer/task.hpp"

namespace seafarer {

struct RunSettings {
  AcquisitionConfig acq;
  RetrievalConfig retrieval;
  TrainConfig train;
  std::size_t budget = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Everything a run reads but does not own.
///
/// `source` is required for seafaring and for any strategy when
/// `remote_pool` is set. `corpus` backs the in-memory small_exact and random
/// strategies. The evaluator-side state (test items and labels) comes from
/// `task`; the learner only ever sees `task->initial` and the oracle.
struct RunContext {
  const Corpus* corpus = nullptr;
  const TagEmbeddings* embeddings = nullptr;
  SearchSource* source = nullptr;
  Oracle* oracle = nullptr;
  const Task* task = nullptr;
  bool remote_pool = false;
};

/// Resumable state after a completed iteration.
struct Checkpoint {
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  nlohmann::json config;
  std::vector<RunRow> rows;
  /// Labeled items in insertion order, initial pair first.
  std::vector<std::pair<Item, int>> labeled;

  nlohmann::json to_json() const;
  static Checkpoint from_json(const nlohmann::json& doc);
  /// Atomic write through a temporary file and rename.
  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

struct RunHooks {
  /// After the model of iteration `iter` is evaluated, before selection.
  std::function<void(std::size_t iter, double auc)> on_evaluated;
  /// After each appended row.
  std::function<void(const RunRow& row, const Checkpoint& state)> on_row;
};

/// Snapshot of the settings stored with every run record.
nlohmann::json settings_to_json(const RunSettings& settings);

/// The active-learning loop. For i = resume_rows+1 .. budget:
///   train on the labeled set (seeded per iteration), record AUC on the test
///   set, select an item with the configured strategy excluding labeled and
///   test ids, query the oracle, append.
/// Each iteration draws its randomness from seeds derived from
/// (settings.seed, i), so a resumed run matches an uninterrupted one.
///
/// Throws SelectionError when the pool is exhausted or an already-labeled
/// item comes back, and propagates oracle failures; in both cases the hooks
/// have already seen every completed row.
RunRecord run(const RunContext& ctx, const RunSettings& settings, const RunHooks& hooks = {},
              const Checkpoint* resume = nullptr);

}  // namespace seafarer
