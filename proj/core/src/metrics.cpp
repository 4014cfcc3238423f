#include "seafarer/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "seafarer/error.hpp"

namespace seafarer {

double roc_auc(std::span<const ScoredLabel> data) {
  std::size_t n_pos = 0;
  for (const auto& d : data) {
    if (!std::isfinite(d.score)) throw ValidationError("roc_auc: non-finite score");
    if (d.label != 0 && d.label != 1) throw ValidationError("roc_auc: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(d.label);
  }
  const std::size_t n_neg = data.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ValidationError("roc_auc: needs at least one positive and one negative");

  std::vector<ScoredLabel> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) { return a.score < b.score; });

  // Walk tie groups in ascending order; each positive earns one credit per
  // negative strictly below it and one half per negative tied with it.
  double credit = 0.0;
  std::size_t neg_below = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    std::size_t pos = 0, neg = 0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      (sorted[j].label == 1 ? pos : neg) += 1;
      ++j;
    }
    credit += static_cast<double>(pos) * (static_cast<double>(neg_below) + 0.5 * static_cast<double>(neg));
    neg_below += neg;
    i = j;
  }
  return credit / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Summary summarize(std::span<const RunRecord> records) {
  if (records.empty()) throw ValidationError("summarize: no run records");
  const std::size_t n_iter = records.front().rows.size();
  if (n_iter == 0) throw ValidationError("summarize: run record has no rows");
  for (const auto& r : records)
    if (r.rows.size() != n_iter) throw ValidationError("summarize: run records have different lengths");

  Summary s;
  const double n = static_cast<double>(records.size());
  for (std::size_t i = 0; i < n_iter; ++i) {
    // Welford: identical runs give a mean equal to the common value and an
    // sd of exactly zero.
    double mean = 0.0, ss = 0.0, k = 0.0;
    for (const auto& r : records) {
      const double x = r.rows[i].auc;
      k += 1.0;
      const double delta = x - mean;
      mean += delta / k;
      ss += delta * (x - mean);
    }
    SummaryRow row;
    row.iter = records.front().rows[i].iter;
    row.mean_auc = mean;
    row.sd_auc = records.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    row.n_runs = records.size();
    s.rows.push_back(row);
  }
  s.final_auc_mean = s.rows.back().mean_auc;
  if (n_iter == 1) {
    s.label_efficiency = s.rows.front().mean_auc;
  } else {
    double area = 0.0;
    for (std::size_t i = 1; i < n_iter; ++i) area += 0.5 * (s.rows[i - 1].mean_auc + s.rows[i].mean_auc);
    s.label_efficiency = area / static_cast<double>(n_iter - 1);
  }
  return s;
}

std::string summary_csv(const Summary& summary) {
  std::string out = "iter,mean_auc,sd_auc,n_runs\n";
  for (const auto& r : summary.rows) {
    out += std::to_string(r.iter) + ',' + format_double(r.mean_auc) + ',' + format_double(r.sd_auc) + ',' +
           std::to_string(r.n_runs) + '\n';
  }
  return out;
}

void write_summary_csv(const Summary& summary, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << summary_csv(summary);
}

namespace {

template <typename T>
T field(std::string_view tok, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError("bad summary field \"" + std::string(tok) + "\"", line);
  return v;
}

}  // namespace

std::vector<SummaryBlock> read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<SummaryBlock> blocks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view rest = std::string_view(line).substr(1);
      while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      if (rest.starts_with("strategy=")) rest.remove_prefix(9);
      blocks.push_back({std::string(rest), {}});
      continue;
    }
    if (line == "iter,mean_auc,sd_auc,n_runs") {
      if (blocks.empty()) blocks.push_back({});
      continue;
    }
    if (blocks.empty()) throw ParseError("summary row before header", line_no);
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (std::size_t c; (c = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, c));
      rest.remove_prefix(c + 1);
    }
    f.push_back(rest);
    if (f.size() != 4) throw ParseError("expected 4 summary columns", line_no);
    blocks.back().rows.push_back({field<std::size_t>(f[0], line_no), field<double>(f[1], line_no),
                                  field<double>(f[2], line_no), field<std::size_t>(f[3], line_no)});
  }
  if (blocks.empty()) throw ParseError("summary CSV is empty");
  return blocks;
}

}  // namespace seafarer
