#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace seafarer {

/// Shared-parameter LinUCB over arm context vectors.
///
/// Keeps A = λI + Σ z zᵀ and b = Σ r z. The score of an arm with context z
/// is θᵀz + α·sqrt(zᵀA⁻¹z) with θ = A⁻¹b.
class LinUcb {
 public:
  LinUcb(std::size_t k, double alpha, double lambda);
  ~LinUcb();
  LinUcb(const LinUcb&);
  LinUcb& operator=(const LinUcb&);
  LinUcb(LinUcb&&) noexcept;
  LinUcb& operator=(LinUcb&&) noexcept;

  std::size_t dim() const noexcept { return k_; }
  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }

  /// Upper confidence bound of one context.
  double ucb(std::span<const double> z) const;
  /// UCB for each row-major context in `contexts` (n × k).
  std::vector<double> ucb_all(std::span<const double> contexts) const;
  /// Index of the largest UCB. Values within a relative 1e-12 of the maximum
  /// count as ties and resolve to the lowest index, so callers that order arms
  /// lexicographically get lexicographic tie-breaking.
  std::size_t select(std::span<const double> contexts) const;

  /// A += z zᵀ, b += r z.
  void update(std::span<const double> z, double reward);

  /// θ = A⁻¹b.
  std::vector<double> theta() const;
  /// Row-major copies of A and b.
  std::vector<double> design_matrix() const;
  std::vector<double> response() const;
  /// Whether A still admits a Cholesky factorisation.
  bool positive_definite() const;
  std::size_t updates() const noexcept { return updates_; }

 private:
  void refresh() const;

  std::size_t k_;
  double alpha_;
  double lambda_;
  std::size_t updates_ = 0;
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace seafarer
