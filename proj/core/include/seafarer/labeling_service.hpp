#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "seafarer/config.hpp"
#include "seafarer/oracle.hpp"
#include "seafarer/retrieval.hpp"

namespace seafarer {

struct LabelingServiceOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  /// Holds checkpoint.json and, once the run completes, the run CSV.
  std::filesystem::path state_dir = "out/human";
};

/// A human-oracle run behind the labeling protocol:
///
///   GET  /api/next    200 {"item_id","url","iteration","tags","features"} | 204
///   POST /api/label   {"item_id","label"} -> 200 | 400 malformed | 409 not pending
///   GET  /api/status  {"iteration","budget","n_pos","n_neg","auc_history","complete","error"?}
///
/// Every response carries permissive CORS headers and OPTIONS preflights are
/// answered with 204. The loop runs on its own thread and checkpoints after
/// every accepted label; a service started over an existing checkpoint
/// resumes from it.
class LabelingService {
 public:
  /// Loads the workspace and binds; throws Error on bind failure.
  LabelingService(const ExperimentConfig& cfg, Strategy strategy, std::uint64_t seed,
                  LabelingServiceOptions options = {});
  ~LabelingService();
  LabelingService(const LabelingService&) = delete;
  LabelingService& operator=(const LabelingService&) = delete;

  int port() const noexcept;
  std::string endpoint() const;
  std::filesystem::path checkpoint_path() const;
  std::filesystem::path csv_path() const;

  HumanOracle& oracle() noexcept;

  /// Blocks until the loop finishes. Returns the failure message, if any.
  std::optional<std::string> wait_for_run();
  /// Closes the oracle (a blocked loop fails resumably) and stops serving.
  void stop();
  /// Blocks until the HTTP thread exits.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace seafarer
