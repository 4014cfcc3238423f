#include "seafarer/labeling_service.hpp"

#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "seafarer/engine.hpp"
#include "seafarer/error.hpp"
#include "seafarer/experiment.hpp"

namespace seafarer {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json status_json(const LabelingStatus& s) {
  json doc = {{"iteration", s.iteration}, {"budget", s.budget},         {"n_pos", s.n_pos},
              {"n_neg", s.n_neg},         {"auc_history", s.auc_history}, {"complete", s.complete}};
  if (!s.error.empty()) doc["error"] = s.error;
  return doc;
}

}  // namespace

struct LabelingService::Impl {
  ExperimentConfig cfg;
  Strategy strategy;
  std::uint64_t seed;
  LabelingServiceOptions options;

  Workspace ws;
  std::unique_ptr<SearchSource> source;
  HumanOracle oracle;
  httplib::Server server;
  int port = -1;
  std::thread http_thread;
  std::thread run_thread;
  std::once_flag stopped;
  std::mutex join_mutex;
  std::optional<std::string> failure;

  void run_loop();
};

void LabelingService::Impl::run_loop() {
  try {
    const Task task = build_run_task(cfg, ws, seed);
    const RunSettings settings = run_settings(cfg, strategy, seed);
    const auto ckpt_path = options.state_dir / "checkpoint.json";

    std::optional<Checkpoint> resume;
    if (std::filesystem::exists(ckpt_path)) resume = Checkpoint::load(ckpt_path);

    std::size_t n_pos = task.initial.n_pos(), n_neg = task.initial.n_neg();
    std::vector<double> aucs;
    if (resume && !resume->rows.empty()) {
      n_pos = resume->rows.back().n_pos;
      n_neg = resume->rows.back().n_neg;
      for (const auto& r : resume->rows) aucs.push_back(r.auc);
    }
    oracle.reset_status(settings.budget, resume ? resume->rows.size() : 0, n_pos, n_neg, std::move(aucs));

    RunContext ctx;
    ctx.corpus = ws.corpus.get();
    ctx.embeddings = ws.embeddings.get();
    ctx.source = source.get();
    ctx.oracle = &oracle;
    ctx.task = &task;
    ctx.remote_pool = cfg.source.kind == SourceKind::remote;

    RunHooks hooks;
    hooks.on_evaluated = [this](std::size_t, double auc) { oracle.record_auc(auc); };
    hooks.on_row = [&](const RunRow&, const Checkpoint& state) { state.save(ckpt_path); };

    RunRecord record = run(ctx, settings, hooks, resume ? &*resume : nullptr);
    write_run_record(record, run_csv_path(options.state_dir, strategy, seed));
    oracle.mark_complete();
  } catch (const std::exception& e) {
    failure = e.what();
    oracle.mark_failed(e.what());
  }
}

LabelingService::LabelingService(const ExperimentConfig& cfg, Strategy strategy, std::uint64_t seed,
                                 LabelingServiceOptions options)
    : impl_(std::make_unique<Impl>()) {
  Impl* self = impl_.get();
  self->cfg = cfg;
  self->strategy = strategy;
  self->seed = seed;
  self->options = std::move(options);
  self->ws = load_workspace(cfg);
  self->source = make_source(cfg, self->ws);

  self->server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                    {"Access-Control-Allow-Headers", "Content-Type"}});

  self->server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  self->server.Get("/api/next", [self](const httplib::Request&, httplib::Response& res) {
    auto pending = self->oracle.pending();
    if (!pending) {
      res.status = 204;
      return;
    }
    const Item& item = pending->item;
    send_json(res, 200,
              {{"item_id", item.id},
               {"url", item.url ? json(*item.url) : json(nullptr)},
               {"iteration", pending->iteration},
               {"tags", item.tags},
               {"features", item.features}});
  });

  self->server.Post("/api/label", [self](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error&) {
      return send_json(res, 400, {{"error", "body must be JSON"}});
    }
    if (!body.is_object() || !body.contains("item_id") || !body["item_id"].is_string() ||
        !body.contains("label") || !body["label"].is_number_integer())
      return send_json(res, 400, {{"error", "expected {\"item_id\": string, \"label\": 0|1}"}});
    const auto id = body["item_id"].get<std::string>();
    const auto label = body["label"].get<long long>();
    if (label != 0 && label != 1) return send_json(res, 400, {{"error", "label must be 0 or 1"}});
    switch (self->oracle.submit(id, static_cast<int>(label))) {
      case HumanOracle::SubmitResult::accepted:
        return send_json(res, 200, {{"accepted", true}, {"item_id", id}});
      case HumanOracle::SubmitResult::not_pending:
        return send_json(res, 409, {{"error", "item " + id + " is not pending"}});
      case HumanOracle::SubmitResult::closed:
        return send_json(res, 409, {{"error", "the labeling session is closed"}});
      case HumanOracle::SubmitResult::invalid_label:
        return send_json(res, 400, {{"error", "label must be 0 or 1"}});
    }
  });

  self->server.Get("/api/status", [self](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, status_json(self->oracle.status()));
  });

  if (self->options.port == 0) {
    self->port = self->server.bind_to_any_port(self->options.host);
  } else if (self->server.bind_to_port(self->options.host, self->options.port)) {
    self->port = self->options.port;
  }
  if (self->port <= 0)
    throw Error("labeling service could not bind " + self->options.host + ":" + std::to_string(self->options.port));

  self->http_thread = std::thread([self] { self->server.listen_after_bind(); });
  self->server.wait_until_ready();
  self->run_thread = std::thread([self] { self->run_loop(); });
}

LabelingService::~LabelingService() {
  stop();
  wait_for_run();
  wait();
}

int LabelingService::port() const noexcept { return impl_->port; }

std::string LabelingService::endpoint() const {
  return "http://" + impl_->options.host + ":" + std::to_string(impl_->port);
}

std::filesystem::path LabelingService::checkpoint_path() const { return impl_->options.state_dir / "checkpoint.json"; }

std::filesystem::path LabelingService::csv_path() const {
  return run_csv_path(impl_->options.state_dir, impl_->strategy, impl_->seed);
}

HumanOracle& LabelingService::oracle() noexcept { return impl_->oracle; }

std::optional<std::string> LabelingService::wait_for_run() {
  std::lock_guard lock(impl_->join_mutex);
  if (impl_->run_thread.joinable()) impl_->run_thread.join();
  return impl_->failure;
}

void LabelingService::stop() {
  std::call_once(impl_->stopped, [this] {
    impl_->oracle.close();
    impl_->server.stop();
  });
}

void LabelingService::wait() {
  if (impl_->http_thread.joinable()) impl_->http_thread.join();
}

}  // namespace seafarer
