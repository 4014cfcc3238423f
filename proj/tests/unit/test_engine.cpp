#include <gtest/gtest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "seafarer/engine.hpp"
#include "seafarer/error.hpp"
#include "seafarer/metrics.hpp"
#include "test_support.hpp"

using namespace seafarer;
using seafarer::testing::make_item;

namespace {

// A synthetic corpus with a rare target tag and a fast run configuration.
struct World {
  std::shared_ptr<const Corpus> corpus;
  std::unique_ptr<TagEmbeddings> emb;
  std::unique_ptr<CorpusSearch> source;
  Task task;

  explicit World(std::uint64_t task_seed = 1) {
    SynthParams p;
    p.n_items = 1500;
    p.n_tags = 25;
    p.d = 8;
    p.k = 6;
    p.seed = 4;
    p.cluster_spread = 0.5;
    auto [c, e] = synth_corpus(p);
    corpus = std::make_shared<const Corpus>(std::move(c));
    emb = std::make_unique<TagEmbeddings>(std::move(e));
    source = std::make_unique<CorpusSearch>(corpus);
    TaskSpec spec;
    spec.tag = tag_for_positive_rate(*corpus, 0.03);
    task = build_task(*corpus, spec, task_seed);
  }

  RunContext ctx() {
    return {corpus.get(), emb.get(), source.get(), task.oracle.get(), &task, false};
  }
};

RunSettings settings(Strategy s, std::size_t budget, std::uint64_t seed) {
  RunSettings rs;
  rs.retrieval.strategy = s;
  rs.retrieval.linucb_iters = 30;
  rs.retrieval.small_pool_size = 300;
  rs.retrieval.seed = seed;
  rs.train.learning_rate = 0.01;
  rs.train.epochs = 30;
  rs.budget = budget;
  rs.seed = seed;
  return rs;
}

constexpr Strategy kAll[] = {Strategy::seafaring, Strategy::small_exact, Strategy::random};

}  // namespace

TEST(Engine, BudgetOneOverThreeSelectableItems) {
  const std::vector<Item> items{
      make_item("p0", {1.0, 0.1}, {"pos"}), make_item("n0", {-1.0, 0.1}, {"neg"}),
      make_item("p1", {1.0, -0.2}, {"pos"}), make_item("n1", {-1.0, -0.2}, {"neg"}),
      make_item("s1", {0.9, 0.3}, {"pos", "neg"}), make_item("s2", {-0.8, 0.2}, {"neg"}),
      make_item("s3", {0.1, 1.0}, {"pos"})};
  const auto corpus = Corpus::from_items(items);
  CorpusSearch source(std::make_shared<const Corpus>(corpus));
  TagEmbeddings emb(2, EmbeddingDefault::seeded_hash_gaussian);
  Task task;
  task.spec.tag = "pos";
  task.oracle = std::make_unique<TagOracle>("pos");
  task.initial_items = {items[0], items[1]};
  task.initial.add("p0", 1);
  task.initial.add("n0", 0);
  task.test_items = {items[2], items[3]};
  task.test_labels = {1, 0};
  RunContext ctx{&corpus, &emb, &source, task.oracle.get(), &task, false};

  for (Strategy s : kAll) {
    auto rs = settings(s, 1, 0);
    rs.retrieval.linucb_iters = 5;
    const auto rec = run(ctx, rs);
    ASSERT_EQ(rec.rows.size(), 1u) << to_string(s);
    const auto& row = rec.rows[0];
    EXPECT_EQ(row.iter, 1u);
    EXPECT_TRUE(row.selected_id == "s1" || row.selected_id == "s2" || row.selected_id == "s3");
    EXPECT_EQ(row.n_pos + row.n_neg, 3u);
    EXPECT_EQ(row.label, corpus.at(*corpus.index_of(row.selected_id)).has_tag("pos") ? 1 : 0);

    rs.budget = 3;
    const auto full = run(ctx, rs);
    std::set<std::string> picked;
    for (const auto& r : full.rows) picked.insert(r.selected_id);
    EXPECT_EQ(picked, (std::set<std::string>{"s1", "s2", "s3"})) << to_string(s);

    rs.budget = 4;
    EXPECT_THROW(run(ctx, rs), SelectionError) << to_string(s);
  }
}

TEST(Engine, RunsAreReproducible) {
  World w;
  for (Strategy s : kAll) {
    const auto a = run(w.ctx(), settings(s, 12, 3));
    const auto b = run(w.ctx(), settings(s, 12, 3));
    EXPECT_EQ(run_record_csv(a), run_record_csv(b)) << to_string(s);
    EXPECT_EQ(a.config, b.config);
  }
}

TEST(Engine, RowInvariants) {
  World w;
  IdSet test_ids;
  for (const auto& it : w.task.test_items) test_ids.insert(it.id);
  for (Strategy s : kAll) {
    const auto rec = run(w.ctx(), settings(s, 20, 5));
    ASSERT_EQ(rec.rows.size(), 20u);
    std::set<std::string> seen;
    for (const auto& e : w.task.initial.entries()) seen.insert(e.item_id);
    std::size_t pos = 1, neg = 1;
    for (std::size_t i = 0; i < rec.rows.size(); ++i) {
      const auto& r = rec.rows[i];
      EXPECT_EQ(r.iter, i + 1);
      EXPECT_FALSE(test_ids.count(r.selected_id)) << "test item selected";
      EXPECT_TRUE(seen.insert(r.selected_id).second) << "selected twice: " << r.selected_id;
      const Item& item = w.corpus->at(*w.corpus->index_of(r.selected_id));
      EXPECT_EQ(r.label, w.task.oracle->label(item));
      (r.label ? pos : neg) += 1;
      EXPECT_EQ(r.n_pos, pos);
      EXPECT_EQ(r.n_neg, neg);
      EXPECT_DOUBLE_EQ(r.neg_pos_ratio, static_cast<double>(neg) / static_cast<double>(std::max<std::size_t>(pos, 1)));
      EXPECT_GE(r.auc, 0.0);
      EXPECT_LE(r.auc, 1.0);
      EXPECT_GE(r.max_candidate_pos_prob, 0.0);
      EXPECT_LE(r.max_candidate_pos_prob, 1.0);
      EXPECT_GE(r.n_model_evals, 1u);
    }
    if (s == Strategy::seafaring) {
      for (const auto& r : rec.rows) EXPECT_EQ(r.n_queries, 30u);
    }
  }
}

TEST(Engine, FirstAucMatchesAnIndependentEvaluation) {
  // Row 1 is the model trained on the initial pair with the iteration-1
  // training seed, scored by brute-force pair counting on the test set.
  World w;
  std::vector<double> reported;
  RunHooks hooks;
  hooks.on_evaluated = [&](std::size_t, double auc) { reported.push_back(auc); };
  const auto rs = settings(Strategy::random, 5, 2);
  const auto rec = run(w.ctx(), rs, hooks);
  ASSERT_EQ(reported.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(reported[i], rec.rows[i].auc);

  TrainConfig tc = rs.train;
  tc.seed = derive_seed(rs.seed, 0x7a1, 1);
  std::vector<TrainingExample> ex;
  for (const auto& it : w.task.initial_items) ex.push_back({it.features, w.task.oracle->label(it)});
  const auto model = train(ex, tc);
  double wins = 0, pairs = 0;
  for (std::size_t a = 0; a < w.task.test_items.size(); ++a) {
    if (w.task.test_labels[a] != 1) continue;
    for (std::size_t b = 0; b < w.task.test_items.size(); ++b) {
      if (w.task.test_labels[b] != 0) continue;
      const double sa = model.logit(w.task.test_items[a].features), sb = model.logit(w.task.test_items[b].features);
      wins += sa > sb ? 1.0 : sa == sb ? 0.5 : 0.0;
      pairs += 1;
    }
  }
  EXPECT_NEAR(rec.rows[0].auc, wins / pairs, 1e-12);
}

TEST(Engine, LearningImprovesAucOnAverage) {
  double first = 0, last = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    World w(seed);
    const auto rec = run(w.ctx(), settings(Strategy::small_exact, 25, seed));
    first += rec.rows.front().auc;
    last += rec.rows.back().auc;
  }
  EXPECT_GT(last / 5, first / 5);
}

TEST(Engine, ResumeMatchesAnUninterruptedRun) {
  World w;
  for (Strategy s : kAll) {
    const auto rs = settings(s, 10, 7);
    std::optional<Checkpoint> at4;
    RunHooks hooks;
    hooks.on_row = [&](const RunRow& row, const Checkpoint& state) {
      if (row.iter == 4) at4 = state;
    };
    const auto full = run(w.ctx(), rs, hooks);
    ASSERT_TRUE(at4);
    EXPECT_EQ(at4->rows.size(), 4u);
    EXPECT_EQ(at4->labeled.size(), 6u);

    // Through JSON, as a service restart would.
    const auto restored = Checkpoint::from_json(nlohmann::json::parse(at4->to_json().dump()));
    const auto resumed = run(w.ctx(), rs, {}, &restored);
    EXPECT_EQ(run_record_csv(resumed), run_record_csv(full)) << to_string(s);
  }
}

TEST(Engine, CheckpointFileRoundTrip) {
  seafarer::testing::TempDir dir;
  World w;
  std::optional<Checkpoint> last;
  RunHooks hooks;
  hooks.on_row = [&](const RunRow&, const Checkpoint& state) { state.save(dir / "ck.json"); last = state; };
  run(w.ctx(), settings(Strategy::small_exact, 3, 1), hooks);
  const auto loaded = Checkpoint::load(dir / "ck.json");
  EXPECT_EQ(loaded.rows, last->rows);
  EXPECT_EQ(loaded.labeled, last->labeled);
  EXPECT_FALSE(std::filesystem::exists(dir / "ck.json.tmp"));
  seafarer::testing::write_file(dir / "bad.json", "{\"seed\": 1}");
  EXPECT_THROW(Checkpoint::load(dir / "bad.json"), ParseError);
}

TEST(Engine, ResumeRejectsAMismatchedCheckpoint) {
  World w;
  std::optional<Checkpoint> ck;
  RunHooks hooks;
  hooks.on_row = [&](const RunRow&, const Checkpoint& state) { ck = state; };
  run(w.ctx(), settings(Strategy::random, 2, 1), hooks);
  EXPECT_THROW(run(w.ctx(), settings(Strategy::random, 5, 2), {}, &*ck), ValidationError);
  auto broken = *ck;
  broken.labeled.pop_back();
  EXPECT_THROW(run(w.ctx(), settings(Strategy::random, 2, 1), {}, &broken), ValidationError);
}

TEST(Engine, MissingCollaboratorsAreRejected) {
  World w;
  auto ctx = w.ctx();
  ctx.source = nullptr;
  EXPECT_THROW(run(ctx, settings(Strategy::seafaring, 2, 0)), ValidationError);
  ctx = w.ctx();
  ctx.embeddings = nullptr;
  EXPECT_THROW(run(ctx, settings(Strategy::seafaring, 2, 0)), ValidationError);
  ctx = w.ctx();
  ctx.corpus = nullptr;
  EXPECT_THROW(run(ctx, settings(Strategy::random, 2, 0)), ValidationError);
  ctx = w.ctx();
  ctx.oracle = nullptr;
  EXPECT_THROW(run(ctx, settings(Strategy::random, 2, 0)), ValidationError);
  EXPECT_THROW(run(w.ctx(), settings(Strategy::random, 0, 0)), ValidationError);
}

TEST(Engine, OracleFailuresPropagateAfterTheLastGoodRow) {
  World w;
  struct Flaky final : Oracle {
    Oracle* inner;
    int calls = 0;
    explicit Flaky(Oracle* o) : inner(o) {}
    int label(const Item& item) override {
      if (++calls == 3) throw OracleError("gone");
      return inner->label(item);
    }
  } flaky(w.task.oracle.get());
  auto ctx = w.ctx();
  ctx.oracle = &flaky;
  std::size_t rows_seen = 0;
  RunHooks hooks;
  hooks.on_row = [&](const RunRow&, const Checkpoint&) { ++rows_seen; };
  EXPECT_THROW(run(ctx, settings(Strategy::random, 5, 0), hooks), OracleError);
  EXPECT_EQ(rows_seen, 2u);
}

TEST(Engine, RecordCarriesTheSettings) {
  World w;
  const auto rs = settings(Strategy::seafaring, 2, 9);
  const auto rec = run(w.ctx(), rs);
  EXPECT_EQ(rec.seed, 9u);
  EXPECT_EQ(rec.config.at("budget"), 2);
  EXPECT_EQ(rec.config.at("retrieval").at("linucb_iters"), 30);
}
