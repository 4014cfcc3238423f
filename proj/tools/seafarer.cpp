// seafarer: experiment runner, labeling service, mock search server and
// corpus utilities.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "seafarer/config.hpp"
#include "seafarer/corpus.hpp"
#include "seafarer/error.hpp"
#include "seafarer/experiment.hpp"
#include "seafarer/labeling_service.hpp"
#include "seafarer/run_record.hpp"
#include "seafarer/search.hpp"

namespace {

using namespace seafarer;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted.store(true); }

struct Bind {
  std::string host = "127.0.0.1";
  int port = 0;
};

Bind parse_bind(const std::string& text) {
  Bind b;
  std::string port = text;
  if (auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) b.host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    b.port = std::stoi(port, &used);
    if (used != port.size() || b.port < 0 || b.port > 65535) throw std::invalid_argument(port);
  } catch (const std::exception&) {
    throw ValidationError("--bind expects [host:]port, got \"" + text + "\"");
  }
  return b;
}

std::optional<std::uint64_t> env_query_cap() {
  const char* v = std::getenv("SEAFARER_QUERY_CAP");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto cap = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return cap;
  } catch (const std::exception&) {
    throw ValidationError(std::string("SEAFARER_QUERY_CAP must be a non-negative integer, got \"") + v + "\"");
  }
}

void configure_logging() {
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  if (const char* level = std::getenv("SEAFARER_LOG"); level && *level) {
    auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && std::string(level) != "off")
      spdlog::warn("unknown SEAFARER_LOG level \"{}\"; keeping info", level);
    else
      spdlog::set_level(parsed);
  }
}

void wait_for_signal(const std::function<bool()>& done = {}) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted.load() && !(done && done())) std::this_thread::sleep_for(std::chrono::milliseconds(50));
}

struct CommonFlags {
  std::string config;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> endpoint;
};

ExperimentConfig load_with_overrides(const CommonFlags& f) {
  ExperimentOverrides o;
  if (f.strategy) {
    try {
      o.strategy = strategy_from_string(*f.strategy);
    } catch (const ValidationError& e) {
      throw ConfigError("--strategy", e.what());
    }
  }
  o.seed = f.seed;
  if (f.out) o.output_dir = *f.out;
  o.endpoint = f.endpoint;
  o.query_cap = env_query_cap();
  return apply_overrides(load_experiment_config(f.config), o);
}

int cmd_run(const CommonFlags& f) {
  const auto cfg = load_with_overrides(f);
  spdlog::info("running {} strateg{} x {} seed(s), budget {}, output {}", cfg.strategies.size(),
               cfg.strategies.size() == 1 ? "y" : "ies", cfg.seeds.size(), cfg.budget, cfg.output_dir.string());
  const auto outcome = run_experiment(cfg, [](const std::string& msg) { spdlog::info("{}", msg); });
  for (const auto& s : outcome.strategies) {
    if (s.summary)
      std::cout << to_string(s.strategy) << " final_mean_auc " << format_double(s.summary->final_auc_mean) << " runs "
                << s.records.size() << '\n';
    else
      std::cout << to_string(s.strategy) << " final_mean_auc n/a runs 0\n";
  }
  for (const auto& failure : outcome.failures) spdlog::error("{}", failure);
  return outcome.ok() ? 0 : 1;
}

int cmd_serve(const CommonFlags& f, const std::string& bind, bool exit_on_complete) {
  const auto cfg = load_with_overrides(f);
  if (cfg.oracle != OracleKind::human) throw ConfigError("oracle", "serve needs \"oracle\": \"human\"");
  const Bind b = parse_bind(bind);
  LabelingServiceOptions opts;
  opts.host = b.host;
  opts.port = b.port;
  opts.state_dir = cfg.output_dir;
  const Strategy strategy = cfg.strategies.front();
  const std::uint64_t seed = cfg.seeds.front();
  LabelingService service(cfg, strategy, seed, opts);
  spdlog::info("labeling service on {} ({} seed {}, budget {}); checkpoint {}", service.endpoint(),
               to_string(strategy), seed, cfg.budget, service.checkpoint_path().string());
  wait_for_signal([&] {
    const auto st = service.oracle().status();
    return exit_on_complete && (st.complete || !st.error.empty());
  });
  const auto st = service.oracle().status();
  service.stop();
  const auto failure = service.wait_for_run();
  service.wait();
  if (st.complete) {
    spdlog::info("run complete: {}", service.csv_path().string());
    return 0;
  }
  if (failure) spdlog::warn("run stopped: {} (resumable from {})", *failure, service.checkpoint_path().string());
  return exit_on_complete ? 1 : 0;
}

int cmd_mock_search(const std::string& corpus_path, const std::string& config, const std::string& bind,
                    int latency_ms) {
  std::shared_ptr<const Corpus> corpus;
  if (!corpus_path.empty()) {
    corpus = std::make_shared<const Corpus>(load_corpus(corpus_path));
  } else if (!config.empty()) {
    corpus = load_workspace(load_experiment_config(config)).corpus;
  } else {
    throw ValidationError("mock-search needs --corpus or --config");
  }
  const Bind b = parse_bind(bind);
  MockSearchServer server(corpus, {b.host, b.port, std::chrono::milliseconds(latency_ms)});
  std::cout << server.endpoint() << std::endl;
  spdlog::info("mock search server on {} over {} items, {} tags", server.endpoint(), corpus->size(),
               corpus->tag_vocab().size());
  wait_for_signal();
  server.stop();
  server.wait();
  return 0;
}

int cmd_synth(const SynthParams& p, const std::string& out) {
  auto [corpus, emb] = synth_corpus(p);
  std::filesystem::create_directories(out);
  const auto corpus_path = std::filesystem::path(out) / "corpus.jsonl";
  const auto emb_path = std::filesystem::path(out) / "embeddings.txt";
  save_corpus(corpus, corpus_path);
  save_embeddings(emb, emb_path);
  spdlog::info("wrote {} items to {} and {} tag embeddings to {}", corpus.size(), corpus_path.string(), emb.size(),
               emb_path.string());
  return 0;
}

int cmd_summarize(const std::string& dir, const std::optional<std::string>& out) {
  const auto blocks = summarize_directory(dir);
  const auto path = out ? std::filesystem::path(*out) : std::filesystem::path(dir) / "summary.csv";
  write_summary_blocks(blocks, path);
  for (const auto& [name, s] : blocks)
    std::cout << name << " final_mean_auc " << format_double(s.final_auc_mean) << " label_efficiency "
              << format_double(s.label_efficiency) << " runs " << s.rows.front().n_runs << '\n';
  spdlog::info("wrote {}", path.string());
  return 0;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--strategy", f.strategy, "only this strategy: seafaring, small_exact, random");
  cmd->add_option("--seed", f.seed, "only this seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--endpoint", f.endpoint, "remote search endpoint, e.g. http://127.0.0.1:8080");
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Pool-based active learning over a tag-search interface"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "run the strategies x seeds of an experiment config");
  add_common(run, run_flags);

  CommonFlags serve_flags;
  std::string serve_bind = "127.0.0.1:8765";
  bool exit_on_complete = false;
  auto* serve = app.add_subcommand("serve", "serve the labeling protocol for a human-oracle run");
  add_common(serve, serve_flags);
  serve->add_option("--bind", serve_bind, "[host:]port");
  serve->add_flag("--exit-on-complete", exit_on_complete, "exit once the budget is spent");

  std::string mock_corpus, mock_config, mock_bind = "127.0.0.1:8080";
  int latency_ms = 0;
  auto* mock = app.add_subcommand("mock-search", "serve the search protocol over a corpus");
  mock->add_option("--corpus", mock_corpus, "corpus JSONL")->check(CLI::ExistingFile);
  mock->add_option("--config", mock_config, "experiment config whose corpus to serve")->check(CLI::ExistingFile);
  mock->add_option("--bind", mock_bind, "[host:]port (port 0 picks one)");
  mock->add_option("--latency-ms", latency_ms, "artificial per-request latency")->check(CLI::NonNegativeNumber);

  SynthParams synth;
  std::string synth_out = "data";
  auto* syn = app.add_subcommand("synth-corpus", "write a synthetic corpus and tag embeddings");
  syn->add_option("--out", synth_out, "output directory");
  syn->add_option("--n-items", synth.n_items);
  syn->add_option("--n-tags", synth.n_tags);
  syn->add_option("--d", synth.d, "feature dimension");
  syn->add_option("--k", synth.k, "tag embedding dimension");
  syn->add_option("--seed", synth.seed);
  syn->add_option("--spread", synth.cluster_spread, "feature noise around tag centres");

  std::string sum_dir;
  std::optional<std::string> sum_out;
  auto* sum = app.add_subcommand("summarize", "summarise run CSVs grouped by strategy directory");
  sum->add_option("dir", sum_dir, "directory holding <strategy>/seed_<n>.csv")->required();
  sum->add_option("--out", sum_out, "summary CSV path (default <dir>/summary.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*serve) return cmd_serve(serve_flags, serve_bind, exit_on_complete);
    if (*mock) return cmd_mock_search(mock_corpus, mock_config, mock_bind, latency_ms);
    if (*syn) return cmd_synth(synth, synth_out);
    if (*sum) return cmd_summarize(sum_dir, sum_out);
  } catch (const ConfigError& e) {
    spdlog::error("config error at {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
