#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "seafarer/metrics.hpp"
#include "seafarer/run_record.hpp"
#include "test_support.hpp"

using seafarer::testing::read_file;
using seafarer::testing::TempDir;
using seafarer::testing::write_file;

namespace {

int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string("SEAFARER_LOG=warn '") + SEAFARER_CLI_PATH + "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_config(const std::filesystem::path& path, const std::string& strategies) {
  write_file(path, R"({
    "corpus": {"synth": {"n_items": 1000, "n_tags": 20, "d": 8, "k": 4, "seed": 3, "cluster_spread": 0.5}},
    "task": {"target_positive_rate": 0.05},
    "strategies": )" + strategies + R"(,
    "retrieval": {"linucb_iters": 20, "small_pool_size": 200},
    "train": {"learning_rate": 0.01, "epochs": 20},
    "budget": 10,
    "seeds": [0, 1, 2]
  })");
}

}  // namespace

TEST(Cli, RunWritesOneCsvPerStrategyAndSeed) {
  TempDir dir;
  write_config(dir / "exp.json", R"(["seafaring", "random"])");
  const auto out = dir / "out";
  ASSERT_EQ(run_cli("run --config '" + (dir / "exp.json").string() + "' --strategy random --seed 1 --out '" +
                        out.string() + "'",
                    dir / "log"),
            0)
      << read_file(dir / "log");
  const auto rec = seafarer::read_run_record(out / "random/seed_1.csv");
  EXPECT_EQ(rec.rows.size(), 10u);
  EXPECT_FALSE(std::filesystem::exists(out / "random/seed_0.csv"));
  EXPECT_FALSE(std::filesystem::exists(out / "seafaring"));
  EXPECT_NE(read_file(dir / "log").find("random final_mean_auc"), std::string::npos);
}

TEST(Cli, RepeatedRunsGiveIdenticalBytes) {
  TempDir dir;
  write_config(dir / "exp.json", R"(["seafaring"])");
  const std::string base = "run --config '" + (dir / "exp.json").string() + "' --seed 2 --out ";
  ASSERT_EQ(run_cli(base + "'" + (dir / "a").string() + "'", dir / "log"), 0) << read_file(dir / "log");
  ASSERT_EQ(run_cli(base + "'" + (dir / "b").string() + "'", dir / "log"), 0) << read_file(dir / "log");
  const auto a = read_file(dir / "a/seafaring/seed_2.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read_file(dir / "b/seafaring/seed_2.csv"));
}

TEST(Cli, ThreeStrategiesGiveThreeSummaryBlocks) {
  TempDir dir;
  write_config(dir / "exp.json", R"(["seafaring", "small_exact", "random"])");
  ASSERT_EQ(run_cli("run --config '" + (dir / "exp.json").string() + "' --out '" + (dir / "out").string() + "'",
                    dir / "log"),
            0)
      << read_file(dir / "log");
  const auto blocks = seafarer::read_summary_csv(dir / "out/summary.csv");
  ASSERT_EQ(blocks.size(), 3u);
  for (const auto& b : blocks) {
    EXPECT_EQ(b.rows.size(), 10u);
    EXPECT_EQ(b.rows[0].n_runs, 3u);
  }

  // summarize re-reads what run wrote and agrees with it.
  ASSERT_EQ(run_cli("summarize '" + (dir / "out").string() + "' --out '" + (dir / "again.csv").string() + "'",
                    dir / "log2"),
            0)
      << read_file(dir / "log2");
  const auto again = seafarer::read_summary_csv(dir / "again.csv");
  ASSERT_EQ(again.size(), 3u);
  for (const auto& b : again) {
    const auto it = std::find_if(blocks.begin(), blocks.end(), [&](const auto& x) { return x.name == b.name; });
    ASSERT_NE(it, blocks.end());
    EXPECT_EQ(b.rows.back().mean_auc, it->rows.back().mean_auc);
  }
}

TEST(Cli, ConfigErrorsExitWithTwoAndNameTheField) {
  TempDir dir;
  write_file(dir / "bad.json", R"({"corpus": {"synth": {}}, "task": {"tag": "t0"}, "budget": 0})");
  EXPECT_EQ(run_cli("run --config '" + (dir / "bad.json").string() + "'", dir / "log"), 2);
  EXPECT_NE(read_file(dir / "log").find("budget"), std::string::npos) << read_file(dir / "log");
  write_config(dir / "ok.json", R"(["seafaring"])");
  EXPECT_EQ(run_cli("run --config '" + (dir / "ok.json").string() + "' --strategy greedy", dir / "log"), 2);
}

TEST(Cli, UsageErrors) {
  TempDir dir;
  EXPECT_NE(run_cli("", dir / "log"), 0);
  EXPECT_NE(run_cli("run", dir / "log"), 0);
  EXPECT_NE(run_cli("frobnicate", dir / "log"), 0);
  EXPECT_EQ(run_cli("--help", dir / "log"), 0);
  EXPECT_NE(read_file(dir / "log").find("mock-search"), std::string::npos);
}

TEST(Cli, SynthCorpusFeedsAConfig) {
  TempDir dir;
  ASSERT_EQ(run_cli("synth-corpus --out '" + (dir / "data").string() + "' --n-items 300 --n-tags 8 --d 4 --k 3",
                    dir / "log"),
            0)
      << read_file(dir / "log");
  ASSERT_TRUE(std::filesystem::exists(dir / "data/corpus.jsonl"));
  ASSERT_TRUE(std::filesystem::exists(dir / "data/embeddings.txt"));
  write_file(dir / "data/exp.json", R"({
    "corpus": {"path": "corpus.jsonl"},
    "embeddings": {"path": "embeddings.txt"},
    "task": {"target_positive_rate": 0.1},
    "retrieval": {"linucb_iters": 10},
    "train": {"learning_rate": 0.01, "epochs": 5},
    "budget": 3,
    "seeds": [0]
  })");
  EXPECT_EQ(run_cli("run --config '" + (dir / "data/exp.json").string() + "' --out '" + (dir / "out").string() + "'",
                    dir / "log"),
            0)
      << read_file(dir / "log");
  EXPECT_EQ(seafarer::read_run_record(dir / "out/seafaring/seed_0.csv").rows.size(), 3u);
}

TEST(Cli, UnreachableEndpointFailsTheRun) {
  TempDir dir;
  write_config(dir / "exp.json", R"(["seafaring"])");
  EXPECT_EQ(run_cli("run --config '" + (dir / "exp.json").string() + "' --seed 0 --endpoint http://127.0.0.1:1 --out '" +
                        (dir / "out").string() + "'",
                    dir / "log"),
            1);
}
