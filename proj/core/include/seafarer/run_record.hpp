#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace seafarer {

struct RunRow {
  std::size_t iter = 0;
  std::string selected_id;
  int label = 0;
  double auc = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double neg_pos_ratio = 0.0;
  double max_candidate_pos_prob = 0.0;
  std::size_t n_model_evals = 0;
  std::size_t n_queries = 0;

  friend bool operator==(const RunRow&, const RunRow&) = default;
};

struct RunRecord {
  std::vector<RunRow> rows;
  nlohmann::json config;  // snapshot of the settings that produced the run
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kRunCsvHeader =
    "iter,selected_id,label,auc,n_pos,n_neg,neg_pos_ratio,max_candidate_pos_prob,n_model_evals,n_queries";

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::string run_record_csv(const RunRecord& record);
/// Writes `<path>` and a sidecar `<path minus .csv>.config.json`.
void write_run_record(const RunRecord& record, const std::filesystem::path& csv_path);
/// Parses the CSV; picks up the sidecar config when present.
RunRecord read_run_record(const std::filesystem::path& csv_path);
std::vector<RunRow> parse_run_csv(std::string_view text);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

nlohmann::json row_to_json(const RunRow& row);
RunRow row_from_json(const nlohmann::json& doc);

}  // namespace seafarer
