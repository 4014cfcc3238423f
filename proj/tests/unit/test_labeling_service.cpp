#include <gtest/gtest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <thread>

#include "seafarer/experiment.hpp"
#include "seafarer/labeling_service.hpp"
#include "test_support.hpp"

using namespace seafarer;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

ExperimentConfig human_config(std::size_t budget) {
  auto doc = json::parse(R"({
    "corpus": {"synth": {"n_items": 600, "n_tags": 15, "d": 6, "k": 4, "seed": 5, "cluster_spread": 0.5}},
    "task": {"target_positive_rate": 0.06},
    "oracle": "human",
    "strategies": ["seafaring"],
    "retrieval": {"linucb_iters": 15},
    "train": {"learning_rate": 0.01, "epochs": 10},
    "seeds": [0]
  })");
  doc["budget"] = budget;
  return parse_experiment_config(doc);
}

struct Session {
  seafarer::testing::TempDir dir;
  std::unique_ptr<LabelingService> service;
  std::unique_ptr<httplib::Client> http;
  ExperimentConfig cfg;
  Task task;

  explicit Session(std::size_t budget) : cfg(human_config(budget)) { start(); }

  void start() {
    LabelingServiceOptions o;
    o.state_dir = dir.path();
    service = std::make_unique<LabelingService>(cfg, Strategy::seafaring, 0, o);
    http = std::make_unique<httplib::Client>(service->endpoint());
    const auto ws = load_workspace(cfg);
    task = build_run_task(cfg, ws, 0);
  }

  // Polls until an item is pending.
  json next() {
    for (int i = 0; i < 2000; ++i) {
      auto res = http->Get("/api/next");
      if (res && res->status == 200) return json::parse(res->body);
      std::this_thread::sleep_for(5ms);
    }
    throw std::runtime_error("no pending item");
  }

  json status() { return json::parse(http->Get("/api/status")->body); }

  int post(const std::string& body) { return http->Post("/api/label", body, "application/json")->status; }

  int label_for(const std::string& id) {
    const auto ws = load_workspace(cfg);
    for (const auto& it : ws.corpus->items())
      if (it.id == id) return task.oracle->label(it);
    throw std::runtime_error("unknown id " + id);
  }
};

std::string label_body(const std::string& id, int label) {
  return json{{"item_id", id}, {"label", label}}.dump();
}

}  // namespace

TEST(LabelingService, NothingPendingIs204AndStatusIsReady) {
  // A blocked oracle is the only source of 200s; before the loop publishes
  // an item, or after close, /api/next answers 204.
  Session s(3);
  s.service->oracle().close();
  s.service->wait_for_run();
  auto res = s.http->Get("/api/next");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  const auto st = s.status();
  EXPECT_EQ(st["budget"], 3);
  EXPECT_EQ(st["iteration"], 0);
  EXPECT_EQ(st["n_pos"], 1);
  EXPECT_EQ(st["n_neg"], 1);
  EXPECT_TRUE(st.contains("error"));
}

TEST(LabelingService, PendingItemShape) {
  Session s(2);
  const auto item = s.next();
  EXPECT_TRUE(item["item_id"].is_string());
  EXPECT_TRUE(item.contains("url"));
  EXPECT_EQ(item["iteration"], 1);
  EXPECT_TRUE(item["tags"].is_array());
  EXPECT_TRUE(item["features"].is_array());
}

TEST(LabelingService, RejectsNonPendingAndMalformedLabels) {
  Session s(2);
  const auto id = s.next()["item_id"].get<std::string>();
  EXPECT_EQ(s.post(label_body("not-" + id, 1)), 409);
  EXPECT_EQ(s.post("not json"), 400);
  EXPECT_EQ(s.post(R"({"item_id": 3, "label": 1})"), 400);
  EXPECT_EQ(s.post(label_body(id, 2)), 400);
  EXPECT_EQ(s.post(json{{"item_id", id}, {"label", "1"}}.dump()), 400);
  EXPECT_EQ(s.status()["iteration"], 0);
  EXPECT_EQ(s.post(label_body(id, 1)), 200);
  EXPECT_EQ(s.post(label_body(id, 1)), 409);  // duplicate
  EXPECT_EQ(s.status()["iteration"], 1);
}

TEST(LabelingService, EachLabelAdvancesTheStatusByOne) {
  Session s(3);
  for (int i = 1; i <= 3; ++i) {
    const auto item = s.next();
    const auto id = item["item_id"].get<std::string>();
    const int y = s.label_for(id);
    const auto before = s.status();
    ASSERT_EQ(s.post(label_body(id, y)), 200);
    const auto after = s.status();
    EXPECT_EQ(after["iteration"].get<int>(), before["iteration"].get<int>() + 1);
    EXPECT_EQ(after["iteration"], i);
    EXPECT_EQ(after["n_pos"].get<int>() + after["n_neg"].get<int>(), 2 + i);
  }
}

TEST(LabelingService, CorsHeadersAndPreflight) {
  Session s(1);
  auto res = s.http->Get("/api/status");
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  res = s.http->Options("/api/label");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_NE(res->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
  EXPECT_NE(res->get_header_value("Access-Control-Allow-Headers").find("Content-Type"), std::string::npos);
}

TEST(LabelingService, FullSessionOfTenLabels) {
  Session s(10);
  for (int i = 0; i < 10; ++i) {
    const auto id = s.next()["item_id"].get<std::string>();
    ASSERT_EQ(s.post(label_body(id, s.label_for(id))), 200);
  }
  EXPECT_FALSE(s.service->wait_for_run());
  const auto st = s.status();
  EXPECT_TRUE(st["complete"].get<bool>());
  EXPECT_EQ(st["iteration"], 10);
  EXPECT_EQ(st["auc_history"].size(), 10u);
  const auto rec = read_run_record(s.service->csv_path());
  EXPECT_EQ(rec.rows.size(), 10u);
  EXPECT_EQ(s.http->Get("/api/next")->status, 204);

  // A human who answers like the tag oracle reproduces the simulated run.
  const auto ws = load_workspace(s.cfg);
  auto source = make_source(s.cfg, ws);
  auto sim_cfg = s.cfg;
  sim_cfg.oracle = OracleKind::simulated;
  const auto sim = run_one(sim_cfg, ws, *source, Strategy::seafaring, 0);
  EXPECT_EQ(rec.rows, sim.rows);
}

TEST(LabelingService, ResumesFromTheCheckpoint) {
  Session s(6);
  std::vector<std::string> first;
  for (int i = 0; i < 3; ++i) {
    const auto id = s.next()["item_id"].get<std::string>();
    first.push_back(id);
    ASSERT_EQ(s.post(label_body(id, s.label_for(id))), 200);
  }
  // Wait for the checkpoint of row 3, then interrupt.
  s.next();
  s.service.reset();
  ASSERT_TRUE(std::filesystem::exists(s.dir / "checkpoint.json"));
  const auto ck = Checkpoint::load(s.dir / "checkpoint.json");
  EXPECT_EQ(ck.rows.size(), 3u);

  s.start();
  auto st = s.status();
  for (int i = 0; i < 200 && st["iteration"] != 3; ++i) {
    std::this_thread::sleep_for(5ms);
    st = s.status();
  }
  EXPECT_EQ(st["iteration"], 3);
  EXPECT_EQ(st["auc_history"].size() >= 3u, true);
  for (int i = 0; i < 3; ++i) {
    const auto item = s.next();
    EXPECT_EQ(item["iteration"], 4 + i);
    const auto id = item["item_id"].get<std::string>();
    ASSERT_EQ(s.post(label_body(id, s.label_for(id))), 200);
  }
  EXPECT_FALSE(s.service->wait_for_run());
  const auto rec = read_run_record(s.service->csv_path());
  ASSERT_EQ(rec.rows.size(), 6u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(rec.rows[i].selected_id, first[i]);
}
