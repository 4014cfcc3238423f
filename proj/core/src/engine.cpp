#include "seafarer/engine.hpp"

#include <fstream>
#include <memory>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "seafarer/config.hpp"
#include "seafarer/error.hpp"
#include "seafarer/metrics.hpp"
#include "seafarer/random.hpp"

namespace seafarer {

namespace {

constexpr std::uint64_t kSelectionStream = 0x5e1ec7;
constexpr std::uint64_t kTrainStream = 0x7a1;
constexpr std::uint64_t kRandomStream = 0x4a4d;
constexpr std::uint64_t kSmallPoolStream = 0x5a11;

}  // namespace

void RunSettings::validate() const {
  acq.validate();
  retrieval.validate();
  train.validate();
  if (budget < 1) throw ValidationError("budget must be >= 1");
}

nlohmann::json settings_to_json(const RunSettings& s) {
  return {{"acquisition", to_json(s.acq)},
          {"retrieval", to_json(s.retrieval)},
          {"train", to_json(s.train)},
          {"budget", s.budget},
          {"seed", s.seed}};
}

nlohmann::json Checkpoint::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) rows_json.push_back(row_to_json(r));
  nlohmann::json labeled_json = nlohmann::json::array();
  for (const auto& [item, y] : labeled) labeled_json.push_back({{"item", item_to_json(item)}, {"label", y}});
  return {{"seed", seed}, {"budget", budget}, {"config", config}, {"rows", rows_json}, {"labeled", labeled_json}};
}

Checkpoint Checkpoint::from_json(const nlohmann::json& doc) {
  try {
    Checkpoint c;
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.budget = doc.at("budget").get<std::size_t>();
    c.config = doc.value("config", nlohmann::json::object());
    for (const auto& r : doc.at("rows")) c.rows.push_back(row_from_json(r));
    for (const auto& e : doc.at("labeled")) c.labeled.emplace_back(item_from_json(e.at("item")), e.at("label").get<int>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint: ") + e.what());
  }
}

void Checkpoint::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint " + tmp.string());
    out << to_json().dump() << '\n';
    if (!out) throw Error("checkpoint write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad checkpoint " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

RunRecord run(const RunContext& ctx, const RunSettings& settings, const RunHooks& hooks,
              const Checkpoint* resume) {
  settings.validate();
  if (!ctx.oracle || !ctx.task) throw ValidationError("run needs an oracle and a task");
  const Task& task = *ctx.task;
  const Strategy strategy = settings.retrieval.strategy;
  const bool need_source = strategy == Strategy::seafaring || ctx.remote_pool;
  if (need_source && !ctx.source) throw ValidationError("strategy " + std::string(to_string(strategy)) + " needs a search source");
  if (strategy == Strategy::seafaring && !ctx.embeddings)
    throw ValidationError("seafaring needs tag embeddings");
  if (!ctx.remote_pool && strategy != Strategy::seafaring && !ctx.corpus)
    throw ValidationError("strategy " + std::string(to_string(strategy)) + " needs an in-memory corpus");
  if (task.test_items.size() != task.test_labels.size()) throw ValidationError("task test set is inconsistent");
  if (task.initial.n_pos() < 1 || task.initial.n_neg() < 1 || task.initial.size() != 2)
    throw ValidationError("the initial labeled set must hold one positive and one negative");

  Checkpoint state;
  state.seed = settings.seed;
  state.budget = settings.budget;
  state.config = settings_to_json(settings);

  LabeledSet labeled;
  std::unordered_map<std::string, Item> items;
  auto append = [&](const Item& item, int y) {
    labeled.add(item.id, y);
    items.emplace(item.id, item);
    state.labeled.emplace_back(item, y);
  };

  if (resume) {
    if (resume->seed != settings.seed || resume->budget != settings.budget)
      throw ValidationError("checkpoint seed or budget does not match the run settings");
    if (resume->labeled.size() != 2 + resume->rows.size())
      throw ValidationError("checkpoint labeled set and rows disagree");
    for (const auto& [item, y] : resume->labeled) append(item, y);
    state.rows = resume->rows;
  } else {
    for (const auto& e : task.initial.entries()) {
      const Item* found = nullptr;
      for (const auto& it : task.initial_items)
        if (it.id == e.item_id) found = &it;
      if (!found) throw ValidationError("initial item " + e.item_id + " has no feature record");
      append(*found, e.label);
    }
  }

  IdSet exclude;
  for (const auto& it : task.test_items) exclude.insert(it.id);
  const IdSet test_ids = exclude;
  for (const auto& e : labeled.entries()) exclude.insert(e.item_id);

  std::optional<SmallPool> pool;
  if (strategy == Strategy::small_exact) {
    const auto pool_seed = derive_seed(settings.seed, kSmallPoolStream);
    pool = ctx.remote_pool ? small_exact_init(*ctx.source, settings.retrieval.small_pool_size,
                                              settings.retrieval.page_size, pool_seed, test_ids)
                           : small_exact_init(*ctx.corpus, settings.retrieval.small_pool_size, pool_seed, test_ids);
  }

  const FeatureResolver resolve = [&](std::string_view id) -> const std::vector<double>* {
    auto it = items.find(std::string(id));
    return it == items.end() ? nullptr : &it->second.features;
  };

  std::vector<ScoredLabel> eval(task.test_items.size());
  for (std::size_t i = state.rows.size() + 1; i <= settings.budget; ++i) {
    TrainConfig tc = settings.train;
    tc.seed = derive_seed(settings.seed, kTrainStream, i);
    const BinaryClassifier model = train(labeled, resolve, tc);

    for (std::size_t t = 0; t < task.test_items.size(); ++t)
      eval[t] = {model.logit(task.test_items[t].features), task.test_labels[t]};
    const double auc = roc_auc(eval);
    if (hooks.on_evaluated) hooks.on_evaluated(i, auc);

    SelectionReport report;
    switch (strategy) {
      case Strategy::seafaring:
        report = seafaring_select(*ctx.source, *ctx.embeddings, model, settings.acq, settings.retrieval, exclude,
                                  derive_seed(settings.seed, kSelectionStream, i));
        break;
      case Strategy::small_exact:
        report = small_exact_select(*pool, model, settings.acq, exclude);
        break;
      case Strategy::random: {
        Rng rng(derive_seed(settings.seed, kRandomStream, i));
        report = ctx.remote_pool
                     ? random_select(*ctx.source, rng, settings.retrieval.page_size, exclude, model, settings.acq)
                     : random_select(*ctx.corpus, rng, exclude, model, settings.acq);
        break;
      }
    }

    if (labeled.contains(report.chosen.id) || test_ids.count(report.chosen.id))
      throw SelectionError("selection returned excluded item " + report.chosen.id + " at iteration " +
                           std::to_string(i));
    const int y = ctx.oracle->label(report.chosen);
    if (y != 0 && y != 1) throw OracleError("oracle returned a non-binary label for " + report.chosen.id);
    append(report.chosen, y);
    exclude.insert(report.chosen.id);

    RunRow row;
    row.iter = i;
    row.selected_id = report.chosen.id;
    row.label = y;
    row.auc = auc;
    row.n_pos = labeled.n_pos();
    row.n_neg = labeled.n_neg();
    row.neg_pos_ratio = labeled.neg_pos_ratio();
    row.max_candidate_pos_prob = report.max_pos_prob_seen;
    row.n_model_evals = report.n_model_evals;
    row.n_queries = report.n_queries;
    state.rows.push_back(row);
    if (hooks.on_row) hooks.on_row(row, state);
  }

  RunRecord record;
  record.rows = std::move(state.rows);
  record.config = std::move(state.config);
  record.seed = settings.seed;
  return record;
}

}  // namespace seafarer
