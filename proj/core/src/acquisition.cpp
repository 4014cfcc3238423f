#include "seafarer/acquisition.hpp"

#include <cmath>
#include <numbers>

#include "seafarer/error.hpp"

namespace seafarer {

std::string_view to_string(AcquisitionKind kind) noexcept {
  switch (kind) {
    case AcquisitionKind::exp_entropy: return "exp_entropy";
    case AcquisitionKind::entropy: return "entropy";
    case AcquisitionKind::least_confidence: return "least_confidence";
    case AcquisitionKind::margin: return "margin";
  }
  return "exp_entropy";
}

AcquisitionKind acquisition_kind_from_string(std::string_view name) {
  if (name == "exp_entropy") return AcquisitionKind::exp_entropy;
  if (name == "entropy") return AcquisitionKind::entropy;
  if (name == "least_confidence") return AcquisitionKind::least_confidence;
  if (name == "margin") return AcquisitionKind::margin;
  throw ValidationError("unknown acquisition kind: " + std::string(name));
}

void AcquisitionConfig::validate() const {
  if (!std::isfinite(gamma)) throw ValidationError("acquisition.gamma must be finite");
}

double AcquisitionConfig::max_score() const {
  switch (kind) {
    case AcquisitionKind::exp_entropy: return std::exp2(gamma);
    case AcquisitionKind::entropy: return std::numbers::ln2;
    case AcquisitionKind::least_confidence: return 0.5;
    case AcquisitionKind::margin: return 0.0;
  }
  return 1.0;
}

double AcquisitionConfig::min_score() const {
  switch (kind) {
    case AcquisitionKind::exp_entropy: return 1.0;
    case AcquisitionKind::margin: return -1.0;
    default: return 0.0;
  }
}

double binary_entropy(double p1) noexcept {
  auto term = [](double p) { return p > 0.0 ? p * std::log(p) : 0.0; };
  return -(term(p1) + term(1.0 - p1));
}

double score(const AcquisitionConfig& cfg, ClassProbabilities proba) {
  const auto [p0, p1] = proba;
  if (!(p0 >= 0.0 && p0 <= 1.0 && p1 >= 0.0 && p1 <= 1.0) || std::abs(p0 + p1 - 1.0) > 1e-9) {
    throw ValidationError("invalid probability pair (" + std::to_string(p0) + ", " +
                          std::to_string(p1) + ")");
  }
  switch (cfg.kind) {
    case AcquisitionKind::exp_entropy: return std::exp(cfg.gamma * binary_entropy(p1));
    case AcquisitionKind::entropy: return binary_entropy(p1);
    case AcquisitionKind::least_confidence: return 1.0 - std::max(p0, p1);
    case AcquisitionKind::margin: return -std::abs(p1 - p0);
  }
  return 0.0;
}

double normalized_reward(const AcquisitionConfig& cfg, double s) {
  if (cfg.kind == AcquisitionKind::exp_entropy) return s / cfg.max_score();
  const double lo = cfg.min_score();
  const double hi = cfg.max_score();
  return (s - lo) / (hi - lo);
}

bool better_candidate(double score_a, std::string_view id_a, double score_b,
                      std::string_view id_b) noexcept {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

ScoredChoice argmax_item(const AcquisitionConfig& cfg, const BinaryClassifier& model,
                         std::span<const Item> candidates, const IdSet& exclude) {
  ScoredChoice best;
  for (const auto& item : candidates) {
    if (exclude.count(item.id)) continue;
    const auto proba = model.predict_proba(item.features);
    const double s = score(cfg, proba);
    if (!best.item || better_candidate(s, item.id, best.score, best.item->id)) {
      best = {&item, s, proba.p1};
    }
  }
  if (!best.item) throw SelectionError("argmax_item: every candidate is excluded");
  return best;
}

}  // namespace seafarer
