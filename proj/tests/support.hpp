#pragma once

#include <Eigen/Dense>
#include <vector>

#include "latent_bandit/env.hpp"

namespace test_support {

// The four-state, two-arm example whose single-arm rewards collide.
inline latent_bandit::RewardMatrix ambiguity_matrix() {
  return latent_bandit::RewardMatrix::from_rows(
      {{0.4, 0.3}, {0.4, 0.5}, {0.6, 0.5}, {0.6, 0.3}});
}

// Batch ridge regression solved from scratch with a full-pivot LU, sharing no
// code with the incremental model.
inline Eigen::VectorXd batch_ridge(const std::vector<Eigen::VectorXd>& xs,
                                   const std::vector<double>& rs, double reg, int dim) {
  Eigen::MatrixXd design(static_cast<Eigen::Index>(xs.size()), dim);
  Eigen::VectorXd target(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    design.row(static_cast<Eigen::Index>(i)) = xs[i].transpose();
    target[static_cast<Eigen::Index>(i)] = rs[i];
  }
  const Eigen::MatrixXd gram =
      design.transpose() * design + reg * Eigen::MatrixXd::Identity(dim, dim);
  return gram.fullPivLu().solve(design.transpose() * target);
}

}  // namespace test_support
