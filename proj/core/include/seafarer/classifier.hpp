#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seafarer/labeled_set.hpp"

namespace seafarer {

struct ClassProbabilities {
  double p0 = 0.5;
  double p1 = 0.5;
};

/// SGD recipe: classical momentum, one example per step, seeded shuffle per
/// epoch. Defaults are the fine-tuning recipe of the reference experiments.
struct TrainConfig {
  double learning_rate = 1e-4;
  double momentum = 0.9;
  int epochs = 100;
  std::uint64_t seed = 0;
  bool l2_normalize_features = true;

  /// Throws ValidationError when out of range.
  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Logistic regression over fixed item features.
class BinaryClassifier {
 public:
  BinaryClassifier() = default;
  BinaryClassifier(std::vector<double> weights, double bias, bool l2_normalize,
                   std::size_t trained_on_count = 0);

  /// Zero weights and bias: predicts (0.5, 0.5) everywhere.
  static BinaryClassifier zeros(std::size_t dim, bool l2_normalize = true);

  std::size_t dim() const noexcept { return weights_.size(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  bool l2_normalize() const noexcept { return l2_normalize_; }
  std::size_t trained_on_count() const noexcept { return trained_on_count_; }

  /// wᵀx̃ + b, x̃ optionally unit-normalised. Throws ValidationError on a
  /// dimension mismatch.
  double logit(std::span<const double> features) const;
  /// p1 = sigmoid(logit), p0 = 1 - p1.
  ClassProbabilities predict_proba(std::span<const double> features) const;

  nlohmann::json to_json() const;
  static BinaryClassifier from_json(const nlohmann::json& doc);

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  bool l2_normalize_ = true;
  std::size_t trained_on_count_ = 0;
};

double sigmoid(double z) noexcept;

/// Copy of `features` scaled to unit L2 norm (zero vectors stay zero).
std::vector<double> l2_normalized(std::span<const double> features);

struct TrainingExample {
  std::span<const double> features;
  int label = 0;
};

/// Looks up features for an item id; returns nullptr when unknown.
using FeatureResolver = std::function<const std::vector<double>*(std::string_view)>;

/// Fits from zero initialisation. Deterministic given (examples, cfg).
/// Throws TrainingError for an empty set, a dimension mismatch or a
/// non-finite loss (naming the step).
BinaryClassifier train(std::span<const TrainingExample> examples, const TrainConfig& cfg);
BinaryClassifier train(const LabeledSet& labeled, const FeatureResolver& resolve,
                       const TrainConfig& cfg);

/// Binary cross-entropy of one example; probabilities are clamped to
/// [1e-7, 1 - 1e-7] here only.
double logistic_loss(const BinaryClassifier& model, std::span<const double> features, int label);

/// Gradient of the unclamped per-example loss w.r.t. (weights..., bias);
/// the returned vector has dim() + 1 entries.
std::vector<double> logistic_loss_gradient(const BinaryClassifier& model,
                                           std::span<const double> features, int label);

}  // namespace seafarer
