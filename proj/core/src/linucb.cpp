#include "seafarer/linucb.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "seafarer/error.hpp"

namespace seafarer {

struct LinUcb::State {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  // Cached A⁻¹ and θ, rebuilt lazily after an update.
  mutable Eigen::MatrixXd a_inv;
  mutable Eigen::VectorXd theta;
  mutable bool dirty = true;
};

LinUcb::LinUcb(std::size_t k, double alpha, double lambda)
    : k_(k), alpha_(alpha), lambda_(lambda), state_(std::make_unique<State>()) {
  if (k == 0) throw ValidationError("LinUCB context dimension must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("LinUCB lambda must be > 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("LinUCB alpha must be >= 0");
  const auto n = static_cast<Eigen::Index>(k);
  state_->a = lambda * Eigen::MatrixXd::Identity(n, n);
  state_->b = Eigen::VectorXd::Zero(n);
}

LinUcb::~LinUcb() = default;
LinUcb::LinUcb(const LinUcb& o)
    : k_(o.k_), alpha_(o.alpha_), lambda_(o.lambda_), updates_(o.updates_),
      state_(std::make_unique<State>(*o.state_)) {}
LinUcb& LinUcb::operator=(const LinUcb& o) {
  if (this != &o) *this = LinUcb(o);
  return *this;
}
LinUcb::LinUcb(LinUcb&&) noexcept = default;
LinUcb& LinUcb::operator=(LinUcb&&) noexcept = default;

void LinUcb::refresh() const {
  if (!state_->dirty) return;
  Eigen::LLT<Eigen::MatrixXd> llt(state_->a);
  if (llt.info() != Eigen::Success) {
    throw Error("LinUCB design matrix is not positive definite");
  }
  const auto n = static_cast<Eigen::Index>(k_);
  state_->a_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  state_->theta = llt.solve(state_->b);
  state_->dirty = false;
}

double LinUcb::ucb(std::span<const double> z) const {
  if (z.size() != k_) throw ValidationError("LinUCB context has the wrong dimension");
  refresh();
  Eigen::Map<const Eigen::VectorXd> v(z.data(), static_cast<Eigen::Index>(k_));
  const double mean = state_->theta.dot(v);
  const double var = std::max(0.0, v.dot(state_->a_inv * v));
  return mean + alpha_ * std::sqrt(var);
}

std::vector<double> LinUcb::ucb_all(std::span<const double> contexts) const {
  if (contexts.size() % k_ != 0) throw ValidationError("LinUCB contexts are not a multiple of k");
  const std::size_t n = contexts.size() / k_;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = ucb(contexts.subspan(i * k_, k_));
  return out;
}

std::size_t LinUcb::select(std::span<const double> contexts) const {
  const auto values = ucb_all(contexts);
  if (values.empty()) throw ValidationError("LinUCB select needs at least one arm");
  const double best = *std::max_element(values.begin(), values.end());
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= best - tol) return i;
  }
  return 0;
}

void LinUcb::update(std::span<const double> z, double reward) {
  if (z.size() != k_) throw ValidationError("LinUCB context has the wrong dimension");
  if (!std::isfinite(reward)) throw ValidationError("LinUCB reward must be finite");
  Eigen::Map<const Eigen::VectorXd> v(z.data(), static_cast<Eigen::Index>(k_));
  state_->a.noalias() += v * v.transpose();
  state_->b += reward * v;
  state_->dirty = true;
  ++updates_;
}

std::vector<double> LinUcb::theta() const {
  refresh();
  return {state_->theta.data(), state_->theta.data() + state_->theta.size()};
}

std::vector<double> LinUcb::design_matrix() const {
  std::vector<double> out(k_ * k_);
  for (std::size_t i = 0; i < k_; ++i)
    for (std::size_t j = 0; j < k_; ++j)
      out[i * k_ + j] = state_->a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

std::vector<double> LinUcb::response() const {
  return {state_->b.data(), state_->b.data() + state_->b.size()};
}

bool LinUcb::positive_definite() const {
  Eigen::LLT<Eigen::MatrixXd> llt(state_->a);
  return llt.info() == Eigen::Success;
}

}  // namespace seafarer
