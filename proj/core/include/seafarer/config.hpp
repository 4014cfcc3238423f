#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seafarer/acquisition.hpp"
#include "seafarer/classifier.hpp"
#include "seafarer/corpus.hpp"
#include "seafarer/retrieval.hpp"
#include "seafarer/task.hpp"

namespace seafarer {

/// Invalid configuration; `path()` names the offending field, e.g.
/// `retrieval.page_size`.
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string path, const std::string& message)
      : ValidationError(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct TaskConfig {
  TaskKind kind = TaskKind::tag;
  std::string tag;  // empty when target_positive_rate picks it
  std::optional<double> target_positive_rate;
  double tau = 0.8;
  double test_fraction = 0.2;
  std::size_t n_references = 10;

  friend bool operator==(const TaskConfig&, const TaskConfig&) = default;
};

enum class SourceKind { memory, remote };
enum class OracleKind { simulated, human };

struct SourceConfig {
  SourceKind kind = SourceKind::memory;
  std::string endpoint;
  std::chrono::milliseconds timeout{5000};
  std::optional<std::uint64_t> query_cap;

  friend bool operator==(const SourceConfig&, const SourceConfig&) = default;
};

struct ExperimentConfig {
  std::optional<std::filesystem::path> corpus_path;
  std::optional<SynthParams> synth;
  std::optional<std::filesystem::path> embeddings_path;
  EmbeddingDefault embedding_default = EmbeddingDefault::seeded_hash_gaussian;
  /// Embedding width when neither a file nor a synthetic corpus provides it.
  std::size_t embedding_dim = 8;
  TaskConfig task;
  OracleKind oracle = OracleKind::simulated;
  std::vector<Strategy> strategies{Strategy::seafaring};
  RetrievalConfig retrieval;
  TrainConfig train;
  AcquisitionConfig acquisition;
  std::size_t budget = 100;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  SourceConfig source;
  std::filesystem::path output_dir = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

bool operator==(const SynthParams& a, const SynthParams& b);

/// Parses and validates. Relative paths are resolved against `base_dir`
/// when given. `retrieval.linucb_iters` defaults to 1000 for in-memory
/// sources and 100 for remote ones. Throws ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Structural checks, plus existence of referenced files when `check_paths`.
void validate(const ExperimentConfig& cfg, bool check_paths = true);
nlohmann::json to_json(const ExperimentConfig& cfg);

nlohmann::json to_json(const AcquisitionConfig& cfg);
nlohmann::json to_json(const RetrievalConfig& cfg);
nlohmann::json to_json(const TrainConfig& cfg);
nlohmann::json to_json(const SynthParams& params);

std::string_view to_string(SourceKind kind) noexcept;
std::string_view to_string(OracleKind kind) noexcept;

}  // namespace seafarer
