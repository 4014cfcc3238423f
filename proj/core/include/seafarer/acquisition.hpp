#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_set>

#include "seafarer/classifier.hpp"
#include "seafarer/corpus.hpp"

namespace seafarer {

enum class AcquisitionKind { exp_entropy, entropy, least_confidence, margin };

std::string_view to_string(AcquisitionKind kind) noexcept;
AcquisitionKind acquisition_kind_from_string(std::string_view name);

struct AcquisitionConfig {
  AcquisitionKind kind = AcquisitionKind::exp_entropy;
  double gamma = 4.0;  // temperature of exp_entropy

  void validate() const;
  /// Supremum of the score over all probability pairs (2^γ for exp_entropy).
  double max_score() const;
  /// Infimum of the score (1 for exp_entropy, -1 for margin, else 0).
  double min_score() const;
  friend bool operator==(const AcquisitionConfig&, const AcquisitionConfig&) = default;
};

/// Natural-log binary entropy with 0·ln 0 = 0.
double binary_entropy(double p1) noexcept;

/// Informativeness of a prediction:
///   exp_entropy      exp(γ·H(p1))
///   entropy          H(p1)
///   least_confidence 1 - max(p0, p1)
///   margin           -|p1 - p0|
/// Throws ValidationError unless p0, p1 ∈ [0, 1] and p0 + p1 = 1 (±1e-9).
double score(const AcquisitionConfig& cfg, ClassProbabilities proba);

/// Score mapped onto [0, 1] for use as a bandit reward. For exp_entropy this
/// is score / 2^γ; other kinds are rescaled linearly by their range.
double normalized_reward(const AcquisitionConfig& cfg, double score);

using IdSet = std::unordered_set<std::string>;

struct ScoredChoice {
  const Item* item = nullptr;
  double score = 0.0;
  double p1 = 0.0;
};

/// True when (score_a, id_a) should be preferred over (score_b, id_b):
/// higher score, then lexicographically smaller id.
bool better_candidate(double score_a, std::string_view id_a, double score_b,
                      std::string_view id_b) noexcept;

/// Highest-scoring candidate not in `exclude`; ties go to the smallest id.
/// Throws SelectionError when every candidate is excluded.
ScoredChoice argmax_item(const AcquisitionConfig& cfg, const BinaryClassifier& model,
                         std::span<const Item> candidates, const IdSet& exclude);

}  // namespace seafarer
