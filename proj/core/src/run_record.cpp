#include "seafarer/run_record.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "seafarer/error.hpp"

namespace seafarer {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* field) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("bad value for ") + field + ": \"" + std::string(tok) + "\"", line);
  }
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string run_record_csv(const RunRecord& record) {
  std::string out(kRunCsvHeader);
  out.push_back('\n');
  for (const auto& r : record.rows) {
    out += std::to_string(r.iter);
    out += ',' + r.selected_id;
    out += ',' + std::to_string(r.label);
    out += ',' + format_double(r.auc);
    out += ',' + std::to_string(r.n_pos);
    out += ',' + std::to_string(r.n_neg);
    out += ',' + format_double(r.neg_pos_ratio);
    out += ',' + format_double(r.max_candidate_pos_prob);
    out += ',' + std::to_string(r.n_model_evals);
    out += ',' + std::to_string(r.n_queries);
    out.push_back('\n');
  }
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".config.json");
  return p;
}

void write_run_record(const RunRecord& record, const std::filesystem::path& csv_path) {
  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
  {
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + csv_path.string());
    out << run_record_csv(record);
  }
  nlohmann::json side = {{"seed", record.seed}, {"config", record.config}};
  std::ofstream out(sidecar_path(csv_path), std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + sidecar_path(csv_path).string());
  out << side.dump(2) << '\n';
}

std::vector<RunRow> parse_run_csv(std::string_view text) {
  std::vector<RunRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kRunCsvHeader) throw ParseError("unexpected run CSV header", line_no);
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 10) throw ParseError("expected 10 columns, got " + std::to_string(f.size()), line_no);
    RunRow r;
    r.iter = parse_number<std::size_t>(f[0], line_no, "iter");
    r.selected_id = std::string(f[1]);
    r.label = parse_number<int>(f[2], line_no, "label");
    r.auc = parse_number<double>(f[3], line_no, "auc");
    r.n_pos = parse_number<std::size_t>(f[4], line_no, "n_pos");
    r.n_neg = parse_number<std::size_t>(f[5], line_no, "n_neg");
    r.neg_pos_ratio = parse_number<double>(f[6], line_no, "neg_pos_ratio");
    r.max_candidate_pos_prob = parse_number<double>(f[7], line_no, "max_candidate_pos_prob");
    r.n_model_evals = parse_number<std::size_t>(f[8], line_no, "n_model_evals");
    r.n_queries = parse_number<std::size_t>(f[9], line_no, "n_queries");
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError("run CSV is empty");
  return rows;
}

RunRecord read_run_record(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw Error("cannot open " + csv_path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  RunRecord record;
  record.rows = parse_run_csv(buf.str());
  if (std::ifstream side(sidecar_path(csv_path)); side) {
    try {
      auto doc = nlohmann::json::parse(side);
      record.seed = doc.value("seed", std::uint64_t{0});
      record.config = doc.value("config", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("bad sidecar " + sidecar_path(csv_path).string() + ": " + e.what());
    }
  }
  return record;
}

nlohmann::json row_to_json(const RunRow& r) {
  return {{"iter", r.iter},
          {"selected_id", r.selected_id},
          {"label", r.label},
          {"auc", r.auc},
          {"n_pos", r.n_pos},
          {"n_neg", r.n_neg},
          {"neg_pos_ratio", r.neg_pos_ratio},
          {"max_candidate_pos_prob", r.max_candidate_pos_prob},
          {"n_model_evals", r.n_model_evals},
          {"n_queries", r.n_queries}};
}

RunRow row_from_json(const nlohmann::json& d) {
  RunRow r;
  r.iter = d.at("iter").get<std::size_t>();
  r.selected_id = d.at("selected_id").get<std::string>();
  r.label = d.at("label").get<int>();
  r.auc = d.at("auc").get<double>();
  r.n_pos = d.at("n_pos").get<std::size_t>();
  r.n_neg = d.at("n_neg").get<std::size_t>();
  r.neg_pos_ratio = d.at("neg_pos_ratio").get<double>();
  r.max_candidate_pos_prob = d.at("max_candidate_pos_prob").get<double>();
  r.n_model_evals = d.at("n_model_evals").get<std::size_t>();
  r.n_queries = d.at("n_queries").get<std::size_t>();
  return r;
}

}  // namespace seafarer
