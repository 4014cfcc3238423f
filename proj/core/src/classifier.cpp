#include "seafarer/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "seafarer/error.hpp"
#include "seafarer/random.hpp"

namespace seafarer {

namespace {

constexpr double kProbClamp = 1e-7;

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ValidationError("train.learning_rate must be finite and > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("train.momentum must be in [0, 1)");
  if (epochs < 1) throw ValidationError("train.epochs must be >= 1");
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> l2_normalized(std::span<const double> features) {
  std::vector<double> out(features.begin(), features.end());
  const double norm = std::sqrt(dot(features, features));
  if (norm > 0.0)
    for (auto& x : out) x /= norm;
  return out;
}

BinaryClassifier::BinaryClassifier(std::vector<double> weights, double bias, bool l2_normalize,
                                   std::size_t trained_on_count)
    : weights_(std::move(weights)),
      bias_(bias),
      l2_normalize_(l2_normalize),
      trained_on_count_(trained_on_count) {
  for (double w : weights_)
    if (!std::isfinite(w)) throw ValidationError("classifier weights must be finite");
  if (!std::isfinite(bias_)) throw ValidationError("classifier bias must be finite");
}

BinaryClassifier BinaryClassifier::zeros(std::size_t dim, bool l2_normalize) {
  return BinaryClassifier(std::vector<double>(dim, 0.0), 0.0, l2_normalize);
}

double BinaryClassifier::logit(std::span<const double> features) const {
  if (features.size() != weights_.size()) {
    throw ValidationError("feature dimension " + std::to_string(features.size()) +
                          " does not match model dimension " + std::to_string(weights_.size()));
  }
  double z = dot(weights_, features);
  if (l2_normalize_) {
    const double norm = std::sqrt(dot(features, features));
    if (norm > 0.0) z /= norm;
  }
  return z + bias_;
}

ClassProbabilities BinaryClassifier::predict_proba(std::span<const double> features) const {
  double p1 = sigmoid(logit(features));
  double p0 = 1.0 - p1;
  // Recompute the smaller side from the larger one so that p0 + p1 == 1
  // holds exactly in floating point.
  if (p0 >= 0.5) p1 = 1.0 - p0;
  return {p0, p1};
}

nlohmann::json BinaryClassifier::to_json() const {
  return {{"d", weights_.size()}, {"weights", weights_}, {"bias", bias_}, {"normalized", l2_normalize_}};
}

BinaryClassifier BinaryClassifier::from_json(const nlohmann::json& doc) {
  try {
    auto weights = doc.at("weights").get<std::vector<double>>();
    if (doc.at("d").get<std::size_t>() != weights.size())
      throw ValidationError("model dump: d does not match weights length");
    return BinaryClassifier(std::move(weights), doc.at("bias").get<double>(),
                            doc.at("normalized").get<bool>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model dump: ") + e.what());
  }
}

double logistic_loss(const BinaryClassifier& model, std::span<const double> features, int label) {
  const double p = std::clamp(sigmoid(model.logit(features)), kProbClamp, 1.0 - kProbClamp);
  return label == 1 ? -std::log(p) : -std::log1p(-p);
}

std::vector<double> logistic_loss_gradient(const BinaryClassifier& model,
                                           std::span<const double> features, int label) {
  const double residual = sigmoid(model.logit(features)) - static_cast<double>(label);
  std::vector<double> x = model.l2_normalize() ? l2_normalized(features)
                                               : std::vector<double>(features.begin(), features.end());
  std::vector<double> grad(x.size() + 1);
  for (std::size_t i = 0; i < x.size(); ++i) grad[i] = residual * x[i];
  grad.back() = residual;
  return grad;
}

BinaryClassifier train(std::span<const TrainingExample> examples, const TrainConfig& cfg) {
  cfg.validate();
  if (examples.empty()) throw TrainingError("cannot train on an empty labeled set");
  const std::size_t dim = examples.front().features.size();
  if (dim == 0) throw TrainingError("training features are empty");

  // Pre-normalise once; the model applies the same transform at predict time.
  std::vector<std::vector<double>> xs;
  xs.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.features.size() != dim) throw TrainingError("inconsistent feature dimensions in training set");
    if (ex.label != 0 && ex.label != 1) throw TrainingError("training labels must be 0 or 1");
    xs.push_back(cfg.l2_normalize_features ? l2_normalized(ex.features)
                                           : std::vector<double>(ex.features.begin(), ex.features.end()));
  }

  std::vector<double> w(dim, 0.0), vw(dim, 0.0);
  double b = 0.0, vb = 0.0;
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);

  std::size_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      ++step;
      const auto& x = xs[idx];
      const double z = dot(w, x) + b;
      if (!std::isfinite(z)) {
        throw TrainingError("non-finite loss at step " + std::to_string(step) + " (epoch " +
                            std::to_string(epoch + 1) + ")");
      }
      const double g = sigmoid(z) - static_cast<double>(examples[idx].label);
      for (std::size_t j = 0; j < dim; ++j) {
        vw[j] = cfg.momentum * vw[j] + g * x[j];
        w[j] -= cfg.learning_rate * vw[j];
      }
      vb = cfg.momentum * vb + g;
      b -= cfg.learning_rate * vb;
    }
  }
  for (double v : w)
    if (!std::isfinite(v)) throw TrainingError("training produced non-finite weights");
  return BinaryClassifier(std::move(w), b, cfg.l2_normalize_features, examples.size());
}

BinaryClassifier train(const LabeledSet& labeled, const FeatureResolver& resolve,
                       const TrainConfig& cfg) {
  std::vector<TrainingExample> examples;
  examples.reserve(labeled.size());
  for (const auto& entry : labeled.entries()) {
    const std::vector<double>* features = resolve(entry.item_id);
    if (!features) throw TrainingError("cannot resolve features for labeled item " + entry.item_id);
    examples.push_back({*features, entry.label});
  }
  return train(examples, cfg);
}

}  // namespace seafarer
