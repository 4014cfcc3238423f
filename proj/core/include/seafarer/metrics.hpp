#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "seafarer/run_record.hpp"

namespace seafarer {

struct ScoredLabel {
  double score = 0.0;
  int label = 0;
};

/// Mann-Whitney ROC-AUC: the fraction of (positive, negative) pairs ranked
/// correctly, ties counting one half. O(n log n). Throws ValidationError on
/// single-class input or non-finite scores.
double roc_auc(std::span<const ScoredLabel> data);

struct SummaryRow {
  std::size_t iter = 0;
  double mean_auc = 0.0;
  double sd_auc = 0.0;  // sample standard deviation, 0 for a single run
  std::size_t n_runs = 0;
};

struct Summary {
  std::vector<SummaryRow> rows;
  double final_auc_mean = 0.0;
  /// Trapezoidal area under the (labels used, mean AUC) curve divided by
  /// its width; equals the AUC itself for a one-row run.
  double label_efficiency = 0.0;
};

/// Per-iteration mean and sample sd of AUC across runs. Runs must have the
/// same number of rows. Throws ValidationError on empty or ragged input.
Summary summarize(std::span<const RunRecord> records);

/// `iter,mean_auc,sd_auc,n_runs`
std::string summary_csv(const Summary& summary);
void write_summary_csv(const Summary& summary, const std::filesystem::path& path);

/// Reads a summary CSV. Lines starting with '#' separate named blocks; a
/// file without them yields one block with an empty name.
struct SummaryBlock {
  std::string name;
  std::vector<SummaryRow> rows;
};
std::vector<SummaryBlock> read_summary_csv(const std::filesystem::path& path);

}  // namespace seafarer
