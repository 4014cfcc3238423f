#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "seafarer/classifier.hpp"
#include "seafarer/error.hpp"
#include "seafarer/random.hpp"

using namespace seafarer;

namespace {

// Reference loss without clamping, written from the definition.
double bce(const std::vector<double>& w, double b, const std::vector<double>& x, int y, bool normalize) {
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  double z = b;
  for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * (normalize && norm > 0 ? x[i] / norm : x[i]);
  const double p = 1.0 / (1.0 + std::exp(-z));
  return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

struct Blob {
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  std::vector<TrainingExample> examples() const {
    std::vector<TrainingExample> out;
    for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({xs[i], ys[i]});
    return out;
  }
};

// Two Gaussian clouds on either side of the first axis.
Blob blobs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Blob b;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    std::vector<double> x{(y ? 2.0 : -2.0) + 0.3 * rng.normal(), 1.0 + 0.3 * rng.normal(), 0.3 * rng.normal()};
    b.xs.push_back(x);
    b.ys.push_back(y);
  }
  return b;
}

}  // namespace

TEST(Classifier, SigmoidIsStableAtExtremes) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_NEAR(sigmoid(2.0) + sigmoid(-2.0), 1.0, 1e-15);
}

TEST(Classifier, ZeroModelPredictsHalf) {
  const auto m = BinaryClassifier::zeros(3);
  const std::vector<double> x{1, 2, 3};
  const auto p = m.predict_proba(x);
  EXPECT_EQ(p.p0, 0.5);
  EXPECT_EQ(p.p1, 0.5);
}

TEST(Classifier, ProbabilitiesSumExactlyToOne) {
  Rng rng(3);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> w{rng.normal() * 20, rng.normal() * 20};
    const BinaryClassifier m(w, rng.normal() * 20, t % 2 == 0);
    const std::vector<double> x{rng.normal(), rng.normal()};
    const auto p = m.predict_proba(x);
    EXPECT_EQ(p.p0 + p.p1, 1.0);
    EXPECT_GE(p.p0, 0.0);
    EXPECT_GE(p.p1, 0.0);
  }
}

TEST(Classifier, LogitNormalisesFeatures) {
  const BinaryClassifier m({1.0, 0.0}, 0.5, true);
  const std::vector<double> x{3.0, 4.0};
  EXPECT_DOUBLE_EQ(m.logit(x), 0.6 + 0.5);
  const BinaryClassifier raw({1.0, 0.0}, 0.5, false);
  EXPECT_DOUBLE_EQ(raw.logit(x), 3.5);
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_DOUBLE_EQ(m.logit(zero), 0.5);
}

TEST(Classifier, GradientMatchesCentralDifferences) {
  Rng rng(11);
  for (bool normalize : {true, false}) {
    for (int t = 0; t < 20; ++t) {
      std::vector<double> w(4), x(4);
      for (auto& v : w) v = rng.normal();
      for (auto& v : x) v = rng.normal();
      const double b = rng.normal();
      const int y = t % 2;
      const BinaryClassifier m(w, b, normalize);
      const auto g = logistic_loss_gradient(m, x, y);
      ASSERT_EQ(g.size(), 5u);
      const double h = 1e-6;
      for (std::size_t j = 0; j <= 4; ++j) {
        auto wp = w, wm = w;
        double bp = b, bm = b;
        if (j < 4) {
          wp[j] += h;
          wm[j] -= h;
        } else {
          bp += h;
          bm -= h;
        }
        const double num = (bce(wp, bp, x, y, normalize) - bce(wm, bm, x, y, normalize)) / (2 * h);
        EXPECT_NEAR(g[j], num, 1e-6) << "coordinate " << j;
      }
      EXPECT_NEAR(logistic_loss(m, x, y), bce(w, b, x, y, normalize), 1e-9);
    }
  }
}

TEST(Classifier, LossIsClamped) {
  const BinaryClassifier m({100.0}, 0.0, false);
  const std::vector<double> x{10.0};
  EXPECT_NEAR(logistic_loss(m, x, 0), -std::log(1e-7), 1e-6);
}

TEST(Classifier, SeparableDataIsLearned) {
  const auto data = blobs(100, 5);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.epochs = 50;
  const auto ex = data.examples();
  const auto m = train(ex, cfg);
  int correct = 0;
  for (std::size_t i = 0; i < data.xs.size(); ++i)
    correct += (m.predict_proba(data.xs[i]).p1 > 0.5) == (data.ys[i] == 1);
  EXPECT_EQ(correct, 100);
  EXPECT_EQ(m.trained_on_count(), 100u);
}

TEST(Classifier, TrainingLowersTheLoss) {
  const auto data = blobs(40, 9);
  const auto ex = data.examples();
  auto mean_loss = [&](const BinaryClassifier& m) {
    double s = 0;
    for (const auto& e : ex) s += logistic_loss(m, e.features, e.label);
    return s / ex.size();
  };
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  EXPECT_LT(mean_loss(train(ex, cfg)), mean_loss(BinaryClassifier::zeros(3)));
}

TEST(Classifier, TrainingIsDeterministicAndSeeded) {
  const auto data = blobs(30, 2);
  const auto ex = data.examples();
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.seed = 42;
  const auto a = train(ex, cfg), b = train(ex, cfg);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(a.bias(), b.bias());
  cfg.seed = 43;
  EXPECT_NE(train(ex, cfg).weights(), a.weights());
}

TEST(Classifier, OneExampleMovesTowardItsLabel) {
  const std::vector<double> x{1.0, 0.0};
  const std::vector<TrainingExample> ex{{x, 1}};
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  EXPECT_GT(train(ex, cfg).predict_proba(x).p1, 0.5);
}

TEST(Classifier, JsonRoundTrip) {
  const BinaryClassifier m({0.1, -1.0 / 3.0}, 2.5, false);
  const auto back = BinaryClassifier::from_json(nlohmann::json::parse(m.to_json().dump()));
  EXPECT_EQ(back.weights(), m.weights());
  EXPECT_EQ(back.bias(), m.bias());
  EXPECT_EQ(back.l2_normalize(), m.l2_normalize());
  EXPECT_THROW(BinaryClassifier::from_json(nlohmann::json{{"d", 3}, {"weights", {1}}, {"bias", 0}, {"normalized", true}}),
               ValidationError);
  EXPECT_THROW(BinaryClassifier::from_json(nlohmann::json{{"weights", {1}}}), ParseError);
}

TEST(Classifier, Errors) {
  const std::vector<TrainingExample> none;
  EXPECT_THROW(train(none, TrainConfig{}), TrainingError);
  const std::vector<double> a{1, 2}, b{1, 2, 3};
  const std::vector<TrainingExample> ragged{{a, 0}, {b, 1}};
  EXPECT_THROW(train(ragged, TrainConfig{}), TrainingError);
  const std::vector<TrainingExample> bad_label{{a, 2}};
  EXPECT_THROW(train(bad_label, TrainConfig{}), TrainingError);
  TrainConfig cfg;
  cfg.learning_rate = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.momentum = 1.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  EXPECT_THROW(BinaryClassifier::zeros(2).logit(b), ValidationError);
  EXPECT_THROW(BinaryClassifier({NAN}, 0, true), ValidationError);
}

TEST(Classifier, DivergenceIsReportedWithTheStep) {
  const std::vector<double> x{1e200, -1e200};
  const std::vector<TrainingExample> ex{{x, 1}, {x, 0}};
  TrainConfig cfg;
  cfg.learning_rate = 1e10;
  cfg.l2_normalize_features = false;
  try {
    train(ex, cfg);
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos) << e.what();
  }
}

TEST(Classifier, LabeledSetOverloadResolvesFeatures) {
  LabeledSet set;
  set.add("x", 1);
  set.add("y", 0);
  const std::vector<double> fx{1.0, 0.0}, fy{0.0, 1.0};
  auto resolve = [&](std::string_view id) -> const std::vector<double>* {
    return id == "x" ? &fx : id == "y" ? &fy : nullptr;
  };
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  const auto m = train(set, resolve, cfg);
  EXPECT_GT(m.predict_proba(fx).p1, m.predict_proba(fy).p1);
  set.add("z", 1);
  EXPECT_THROW(train(set, resolve, cfg), TrainingError);
}
