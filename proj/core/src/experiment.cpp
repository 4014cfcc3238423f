#include "seafarer/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "seafarer/error.hpp"
#include "seafarer/random.hpp"

namespace seafarer {

namespace {

constexpr std::uint64_t kTaskStream = 0x7a5c;

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig cfg, const ExperimentOverrides& o) {
  if (o.strategy) cfg.strategies = {*o.strategy};
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.endpoint) {
    if (cfg.source.kind != SourceKind::remote) {
      cfg.source.kind = SourceKind::remote;
      // Switching the source keeps an explicit iteration count but moves the
      // in-memory default to the remote one.
      if (cfg.retrieval.linucb_iters == kSimulatedLinUcbIters) cfg.retrieval.linucb_iters = kRemoteLinUcbIters;
    }
    cfg.source.endpoint = *o.endpoint;
  }
  if (o.query_cap) cfg.source.query_cap = *o.query_cap;
  validate(cfg, false);
  return cfg;
}

Workspace load_workspace(const ExperimentConfig& cfg) {
  Workspace ws;
  std::optional<TagEmbeddings> synth_embeddings;
  if (cfg.synth) {
    auto [corpus, emb] = synth_corpus(*cfg.synth);
    ws.corpus = std::make_shared<const Corpus>(std::move(corpus));
    synth_embeddings.emplace(std::move(emb));
  } else {
    ws.corpus = std::make_shared<const Corpus>(load_corpus(*cfg.corpus_path));
  }

  if (cfg.embeddings_path) {
    ws.embeddings = std::make_shared<const TagEmbeddings>(load_embeddings(*cfg.embeddings_path, cfg.embedding_default));
  } else if (synth_embeddings) {
    // Rebuild under the configured default policy for unknown tags.
    TagEmbeddings emb(synth_embeddings->dim(), cfg.embedding_default);
    for (auto& [tag, v] : synth_embeddings->entries()) emb.insert(tag, v);
    ws.embeddings = std::make_shared<const TagEmbeddings>(std::move(emb));
  } else {
    ws.embeddings = std::make_shared<const TagEmbeddings>(cfg.embedding_dim, cfg.embedding_default);
  }
  return ws;
}

TaskSpec resolve_task(const ExperimentConfig& cfg, const Corpus& corpus) {
  TaskSpec spec;
  spec.kind = cfg.task.kind;
  spec.tag = cfg.task.target_positive_rate ? tag_for_positive_rate(corpus, *cfg.task.target_positive_rate)
                                           : cfg.task.tag;
  spec.tau = cfg.task.tau;
  spec.test_fraction = cfg.task.test_fraction;
  spec.n_references = cfg.task.n_references;
  return spec;
}

Task build_run_task(const ExperimentConfig& cfg, const Workspace& ws, std::uint64_t seed) {
  return build_task(*ws.corpus, resolve_task(cfg, *ws.corpus), derive_seed(seed, kTaskStream));
}

RunSettings run_settings(const ExperimentConfig& cfg, Strategy strategy, std::uint64_t seed) {
  RunSettings s;
  s.acq = cfg.acquisition;
  s.retrieval = cfg.retrieval;
  s.retrieval.strategy = strategy;
  s.retrieval.seed = seed;
  s.train = cfg.train;
  s.budget = cfg.budget;
  s.seed = seed;
  return s;
}

std::unique_ptr<SearchSource> make_source(const ExperimentConfig& cfg, const Workspace& ws,
                                          std::shared_ptr<SearchBudgetMeter> meter) {
  if (cfg.source.kind == SourceKind::memory) return std::make_unique<CorpusSearch>(ws.corpus);
  if (!meter) meter = std::make_shared<SearchBudgetMeter>(cfg.source.query_cap);
  return std::make_unique<RemoteSearch>(RemoteSearchOptions{cfg.source.endpoint, cfg.source.timeout}, meter);
}

RunRecord run_one(const ExperimentConfig& cfg, const Workspace& ws, SearchSource& source, Strategy strategy,
                  std::uint64_t seed, const RunHooks& hooks) {
  const Task task = build_run_task(cfg, ws, seed);
  RunContext ctx;
  ctx.corpus = ws.corpus.get();
  ctx.embeddings = ws.embeddings.get();
  ctx.source = &source;
  ctx.oracle = task.oracle.get();
  ctx.task = &task;
  ctx.remote_pool = cfg.source.kind == SourceKind::remote;
  RunRecord record = run(ctx, run_settings(cfg, strategy, seed), hooks);
  record.config["task"] = {{"kind", std::string(to_string(task.spec.kind))},
                           {"tag", task.spec.tag},
                           {"tau", task.spec.tau},
                           {"test_fraction", task.spec.test_fraction},
                           {"test_size", task.test_items.size()},
                           {"test_positives", task.test_positives()}};
  record.config["source"] = std::string(to_string(cfg.source.kind));
  return record;
}

std::filesystem::path run_csv_path(const std::filesystem::path& out, Strategy strategy, std::uint64_t seed) {
  return out / std::string(to_string(strategy)) / ("seed_" + std::to_string(seed) + ".csv");
}

void write_summary_blocks(const std::vector<std::pair<std::string, Summary>>& blocks,
                          const std::filesystem::path& path) {
  std::string text;
  for (const auto& [name, summary] : blocks) text += "# strategy=" + name + "\n" + summary_csv(summary);
  write_text(path, text);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  const Workspace ws = load_workspace(cfg);
  auto meter = std::make_shared<SearchBudgetMeter>(cfg.source.query_cap);
  auto source = make_source(cfg, ws, meter);
  write_text(cfg.output_dir / "config.json", to_json(cfg).dump(2) + "\n");

  ExperimentOutcome outcome;
  std::vector<std::pair<std::string, Summary>> blocks;
  for (Strategy strategy : cfg.strategies) {
    StrategyOutcome so{strategy, {}, std::nullopt};
    for (std::uint64_t seed : cfg.seeds) {
      const std::string label = std::string(to_string(strategy)) + " seed " + std::to_string(seed);
      try {
        RunRecord record = run_one(cfg, ws, *source, strategy, seed);
        const auto path = run_csv_path(cfg.output_dir, strategy, seed);
        write_run_record(record, path);
        say(label + ": final AUC " + format_double(record.rows.back().auc) + " -> " + path.string());
        so.records.push_back(std::move(record));
      } catch (const std::exception& e) {
        outcome.failures.push_back(label + ": " + e.what());
        say(label + " failed: " + e.what());
      }
    }
    if (!so.records.empty()) {
      so.summary = summarize(so.records);
      write_summary_csv(*so.summary, cfg.output_dir / ("summary_" + std::string(to_string(strategy)) + ".csv"));
      blocks.emplace_back(std::string(to_string(strategy)), *so.summary);
    }
    outcome.strategies.push_back(std::move(so));
  }
  if (!blocks.empty()) write_summary_blocks(blocks, cfg.output_dir / "summary.csv");
  return outcome;
}

std::vector<std::pair<std::string, Summary>> summarize_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::map<std::string, std::vector<std::filesystem::path>> groups;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() != ".csv" || !p.filename().string().starts_with("seed_")) continue;
    groups[p.parent_path().filename().string()].push_back(p);
  }
  if (groups.empty()) throw Error("no seed_*.csv run records under " + dir.string());
  std::vector<std::pair<std::string, Summary>> out;
  for (auto& [name, paths] : groups) {
    std::sort(paths.begin(), paths.end());
    std::vector<RunRecord> records;
    for (const auto& p : paths) records.push_back(read_run_record(p));
    out.emplace_back(name, summarize(records));
  }
  return out;
}

}  // namespace seafarer
