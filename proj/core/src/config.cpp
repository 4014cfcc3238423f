#include "seafarer/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "seafarer/error.hpp"

namespace seafarer {

using nlohmann::json;

bool operator==(const SynthParams& a, const SynthParams& b) {
  return a.n_items == b.n_items && a.n_tags == b.n_tags && a.d == b.d && a.k == b.k && a.seed == b.seed &&
         a.cluster_spread == b.cluster_spread;
}

std::string_view to_string(SourceKind kind) noexcept { return kind == SourceKind::remote ? "remote" : "memory"; }
std::string_view to_string(OracleKind kind) noexcept { return kind == OracleKind::human ? "human" : "simulated"; }

namespace {

// Typed access to one JSON object that reports errors by dotted field path
// and rejects keys it was never asked about.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string at(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = obj_.find(std::string(key));
    return it == obj_.end() || it->is_null() ? nullptr : &*it;
  }

  template <typename T>
  std::optional<T> get(std::string_view key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError(at(key), "must be a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw ConfigError(at(key), "must be a string");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw ConfigError(at(key), "must be a number");
      } else {
        if (!v->is_number_integer()) throw ConfigError(at(key), "must be an integer");
        if (std::is_unsigned_v<T> && !v->is_number_unsigned() && v->get<std::int64_t>() < 0)
          throw ConfigError(at(key), "must be non-negative");
      }
      return v->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(at(key), e.what());
    }
  }

  template <typename T>
  void read(std::string_view key, T& out) {
    if (auto v = get<T>(key)) out = *v;
  }

  template <typename Enum, typename Parse>
  void read_enum(std::string_view key, Enum& out, Parse parse) {
    if (auto v = get<std::string>(key)) {
      try {
        out = parse(*v);
      } catch (const ValidationError& e) {
        throw ConfigError(at(key), e.what());
      }
    }
  }

  void finish() const {
    for (const auto& [k, _] : obj_.items())
      if (!seen_.count(k)) throw ConfigError(at(k), "unknown field");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

// Turns a message from a validate() member into a field-path error.
template <typename Fn>
void check(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    std::string field = path;
    // Messages from the component validators start with "<section>.<field>".
    if (auto sp = msg.find(' '); sp != std::string::npos && msg.compare(0, path.size() + 1, path + ".") == 0) {
      field = msg.substr(0, sp);
      msg = msg.substr(sp + 1);
    }
    throw ConfigError(field, msg);
  }
}

}  // namespace

json to_json(const AcquisitionConfig& c) {
  return {{"kind", std::string(to_string(c.kind))}, {"gamma", c.gamma}};
}

json to_json(const RetrievalConfig& c) {
  return {{"linucb_iters", c.linucb_iters},
          {"page_size", c.page_size},
          {"alpha", c.alpha},
          {"lambda", c.lambda},
          {"reward_aggregation", std::string(to_string(c.reward_agg))},
          {"small_pool_size", c.small_pool_size}};
}

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"momentum", c.momentum},
          {"epochs", c.epochs},
          {"l2_normalize_features", c.l2_normalize_features}};
}

json to_json(const SynthParams& p) {
  return {{"n_items", p.n_items}, {"n_tags", p.n_tags},         {"d", p.d},
          {"k", p.k},             {"seed", p.seed}, {"cluster_spread", p.cluster_spread}};
}

json to_json(const ExperimentConfig& c) {
  json doc;
  json corpus = json::object();
  if (c.corpus_path) corpus["path"] = c.corpus_path->string();
  if (c.synth) corpus["synth"] = to_json(*c.synth);
  doc["corpus"] = corpus;

  json emb = {{"default", std::string(to_string(c.embedding_default))}, {"dim", c.embedding_dim}};
  if (c.embeddings_path) emb["path"] = c.embeddings_path->string();
  doc["embeddings"] = emb;

  json task = {{"kind", std::string(to_string(c.task.kind))},
               {"tau", c.task.tau},
               {"test_fraction", c.task.test_fraction},
               {"n_references", c.task.n_references}};
  if (!c.task.tag.empty()) task["tag"] = c.task.tag;
  if (c.task.target_positive_rate) task["target_positive_rate"] = *c.task.target_positive_rate;
  doc["task"] = task;

  doc["oracle"] = std::string(to_string(c.oracle));
  json strategies = json::array();
  for (auto s : c.strategies) strategies.push_back(std::string(to_string(s)));
  doc["strategies"] = strategies;
  doc["retrieval"] = to_json(c.retrieval);
  doc["train"] = to_json(c.train);
  doc["acquisition"] = to_json(c.acquisition);
  doc["budget"] = c.budget;
  doc["seeds"] = c.seeds;

  json source = {{"kind", std::string(to_string(c.source.kind))}};
  if (c.source.kind == SourceKind::remote) {
    source["endpoint"] = c.source.endpoint;
    source["timeout_ms"] = c.source.timeout.count();
    if (c.source.query_cap) source["query_cap"] = *c.source.query_cap;
  }
  doc["source"] = source;
  doc["output_dir"] = c.output_dir.string();
  return doc;
}

ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  Fields root(doc, "");

  if (const json* corpus = root.find("corpus")) {
    Fields f(*corpus, "corpus");
    if (auto p = f.get<std::string>("path")) c.corpus_path = resolve(base_dir, *p);
    if (const json* synth = f.find("synth")) {
      Fields s(*synth, "corpus.synth");
      SynthParams p;
      s.read("n_items", p.n_items);
      s.read("n_tags", p.n_tags);
      s.read("d", p.d);
      s.read("k", p.k);
      s.read("seed", p.seed);
      s.read("cluster_spread", p.cluster_spread);
      s.finish();
      c.synth = p;
    }
    f.finish();
  }

  if (const json* emb = root.find("embeddings")) {
    Fields f(*emb, "embeddings");
    if (auto p = f.get<std::string>("path")) c.embeddings_path = resolve(base_dir, *p);
    f.read_enum("default", c.embedding_default, embedding_default_from_string);
    f.read("dim", c.embedding_dim);
    f.finish();
  }

  if (const json* task = root.find("task")) {
    Fields f(*task, "task");
    f.read_enum("kind", c.task.kind, task_kind_from_string);
    f.read("tag", c.task.tag);
    c.task.target_positive_rate = f.get<double>("target_positive_rate");
    f.read("tau", c.task.tau);
    f.read("test_fraction", c.task.test_fraction);
    f.read("n_references", c.task.n_references);
    f.finish();
  }

  root.read_enum("oracle", c.oracle, [](std::string_view s) {
    if (s == "simulated") return OracleKind::simulated;
    if (s == "human") return OracleKind::human;
    throw ValidationError("unknown oracle kind: " + std::string(s));
  });

  if (const json* strategies = root.find("strategies")) {
    if (!strategies->is_array()) throw ConfigError("strategies", "must be an array");
    c.strategies.clear();
    for (std::size_t i = 0; i < strategies->size(); ++i) {
      const auto& s = (*strategies)[i];
      const std::string path = "strategies[" + std::to_string(i) + "]";
      if (!s.is_string()) throw ConfigError(path, "must be a string");
      try {
        c.strategies.push_back(strategy_from_string(s.get<std::string>()));
      } catch (const ValidationError& e) {
        throw ConfigError(path, e.what());
      }
    }
  }

  if (const json* src = root.find("source")) {
    Fields f(*src, "source");
    f.read_enum("kind", c.source.kind, [](std::string_view s) {
      if (s == "memory") return SourceKind::memory;
      if (s == "remote") return SourceKind::remote;
      throw ValidationError("unknown source kind: " + std::string(s));
    });
    f.read("endpoint", c.source.endpoint);
    if (auto t = f.get<std::int64_t>("timeout_ms")) c.source.timeout = std::chrono::milliseconds(*t);
    c.source.query_cap = f.get<std::uint64_t>("query_cap");
    f.finish();
  }

  c.retrieval.linucb_iters = c.source.kind == SourceKind::remote ? kRemoteLinUcbIters : kSimulatedLinUcbIters;
  if (const json* r = root.find("retrieval")) {
    Fields f(*r, "retrieval");
    f.read("linucb_iters", c.retrieval.linucb_iters);
    f.read("page_size", c.retrieval.page_size);
    f.read("alpha", c.retrieval.alpha);
    f.read("lambda", c.retrieval.lambda);
    f.read_enum("reward_aggregation", c.retrieval.reward_agg, reward_aggregation_from_string);
    f.read("small_pool_size", c.retrieval.small_pool_size);
    f.finish();
  }

  if (const json* t = root.find("train")) {
    Fields f(*t, "train");
    f.read("learning_rate", c.train.learning_rate);
    f.read("momentum", c.train.momentum);
    f.read("epochs", c.train.epochs);
    f.read("l2_normalize_features", c.train.l2_normalize_features);
    f.finish();
  }

  if (const json* a = root.find("acquisition")) {
    Fields f(*a, "acquisition");
    f.read_enum("kind", c.acquisition.kind, acquisition_kind_from_string);
    f.read("gamma", c.acquisition.gamma);
    f.finish();
  }

  root.read("budget", c.budget);
  if (const json* seeds = root.find("seeds")) {
    if (!seeds->is_array()) throw ConfigError("seeds", "must be an array");
    c.seeds.clear();
    for (std::size_t i = 0; i < seeds->size(); ++i) {
      const json& seed = (*seeds)[i];
      if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
        throw ConfigError("seeds[" + std::to_string(i) + "]", "must be a non-negative integer");
      c.seeds.push_back((*seeds)[i].get<std::uint64_t>());
    }
  }
  if (auto out = root.get<std::string>("output_dir")) c.output_dir = *out;
  root.finish();

  validate(c, false);
  return c;
}

void validate(const ExperimentConfig& c, bool check_paths) {
  if (c.corpus_path.has_value() == c.synth.has_value())
    throw ConfigError("corpus", "exactly one of corpus.path and corpus.synth must be set");
  if (c.synth) {
    const auto& s = *c.synth;
    if (s.n_items < 2) throw ConfigError("corpus.synth.n_items", "must be >= 2");
    if (s.n_tags < 1) throw ConfigError("corpus.synth.n_tags", "must be >= 1");
    if (s.d < 2) throw ConfigError("corpus.synth.d", "must be >= 2");
    if (s.k < 1) throw ConfigError("corpus.synth.k", "must be >= 1");
    if (!(s.cluster_spread >= 0.0) || !std::isfinite(s.cluster_spread))
      throw ConfigError("corpus.synth.cluster_spread", "must be finite and >= 0");
  }
  if (c.embedding_dim < 1) throw ConfigError("embeddings.dim", "must be >= 1");

  if (c.task.tag.empty() == !c.task.target_positive_rate.has_value())
    throw ConfigError("task", "exactly one of task.tag and task.target_positive_rate must be set");
  if (c.task.target_positive_rate && !(*c.task.target_positive_rate > 0.0 && *c.task.target_positive_rate < 1.0))
    throw ConfigError("task.target_positive_rate", "must be in (0, 1)");
  check("task", [&] {
    TaskSpec spec{c.task.kind, c.task.tag.empty() ? "placeholder" : c.task.tag, c.task.tau, c.task.test_fraction,
                  c.task.n_references};
    spec.validate();
  });

  if (c.strategies.empty()) throw ConfigError("strategies", "must be non-empty");
  {
    std::set<Strategy> uniq(c.strategies.begin(), c.strategies.end());
    if (uniq.size() != c.strategies.size()) throw ConfigError("strategies", "must not repeat a strategy");
  }
  check("retrieval", [&] { c.retrieval.validate(); });
  check("train", [&] { c.train.validate(); });
  check("acquisition", [&] { c.acquisition.validate(); });
  if (c.budget < 1) throw ConfigError("budget", "must be >= 1");
  if (c.seeds.empty()) throw ConfigError("seeds", "must be non-empty");
  {
    std::set<std::uint64_t> uniq(c.seeds.begin(), c.seeds.end());
    if (uniq.size() != c.seeds.size()) throw ConfigError("seeds", "must not repeat a seed");
  }

  if (c.source.kind == SourceKind::remote) {
    if (c.source.endpoint.empty()) throw ConfigError("source.endpoint", "required for a remote source");
    if (c.source.timeout.count() < 1) throw ConfigError("source.timeout_ms", "must be >= 1");
  }
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must be non-empty");

  if (check_paths) {
    if (c.corpus_path && !std::filesystem::exists(*c.corpus_path))
      throw ConfigError("corpus.path", "file not found: " + c.corpus_path->string());
    if (c.embeddings_path && !std::filesystem::exists(*c.embeddings_path))
      throw ConfigError("embeddings.path", "file not found: " + c.embeddings_path->string());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON in ") + path.string() + ": " + e.what());
  }
  auto cfg = parse_experiment_config(doc, path.parent_path());
  validate(cfg, true);
  return cfg;
}

}  // namespace seafarer
