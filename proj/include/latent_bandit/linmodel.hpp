#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "latent_bandit/rng.hpp"

namespace latent_bandit {

using ContextVector = Eigen::VectorXd;

struct Prediction {
  double mean;
  double variance;  // x^T A^{-1} x
};

/// Incremental ridge regression for one arm (the LinUCB per-arm model).
///
/// Stores the precision matrix A = reg * I + sum x x^T and the moment vector
/// b = sum r x. Queries solve against a cached Cholesky factor of A that is
/// refreshed lazily after updates, so no explicit inverse is ever formed.
class ArmLinearModel {
 public:
  ArmLinearModel(std::size_t dim, double reg);

  std::size_t dim() const { return static_cast<std::size_t>(moment_.size()); }
  double reg() const { return reg_; }
  std::size_t num_updates() const { return num_updates_; }

  const Eigen::MatrixXd& precision() const { return precision_; }
  const Eigen::VectorXd& moment() const { return moment_; }

  void update(const ContextVector& x, double reward);

  /// theta_hat = A^{-1} b.
  const Eigen::VectorXd& theta() const;

  Prediction predict(const ContextVector& x) const;

  /// x^T theta_hat + alpha * sqrt(x^T A^{-1} x).
  double ucb_score(const ContextVector& x, double alpha) const;

  /// Draw from Normal(theta_hat, noise_scale^2 * A^{-1}).
  Eigen::VectorXd sample_parameters(double noise_scale, Rng& rng) const;

 private:
  void check_dim(const ContextVector& x) const;
  void refresh() const;

  double reg_;
  Eigen::MatrixXd precision_;
  Eigen::VectorXd moment_;
  std::size_t num_updates_ = 0;

  mutable bool stale_ = true;
  mutable Eigen::LLT<Eigen::MatrixXd> factor_;
  mutable Eigen::VectorXd theta_;
};

}  // namespace latent_bandit
