#include "latent_bandit/linmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace latent_bandit {

ArmLinearModel::ArmLinearModel(std::size_t dim, double reg) : reg_(reg) {
  if (dim == 0) throw std::invalid_argument("model dimension must be >= 1");
  if (!(reg > 0.0)) throw std::invalid_argument("regularization must be > 0");
  const auto d = static_cast<Eigen::Index>(dim);
  precision_ = reg * Eigen::MatrixXd::Identity(d, d);
  moment_ = Eigen::VectorXd::Zero(d);
}

void ArmLinearModel::check_dim(const ContextVector& x) const {
  if (x.size() != moment_.size()) {
    throw std::invalid_argument("context dimension does not match model");
  }
}

void ArmLinearModel::update(const ContextVector& x, double reward) {
  check_dim(x);
  precision_.selfadjointView<Eigen::Lower>().rankUpdate(x);
  precision_.triangularView<Eigen::StrictlyUpper>() = precision_.transpose();
  moment_.noalias() += reward * x;
  ++num_updates_;
  stale_ = true;
}

void ArmLinearModel::refresh() const {
  if (!stale_) return;
  factor_.compute(precision_);
  theta_ = factor_.solve(moment_);
  stale_ = false;
}

const Eigen::VectorXd& ArmLinearModel::theta() const {
  refresh();
  return theta_;
}

Prediction ArmLinearModel::predict(const ContextVector& x) const {
  check_dim(x);
  refresh();
  // x^T A^{-1} x = |L^{-1} x|^2
  const Eigen::VectorXd half = factor_.matrixL().solve(x);
  return {x.dot(theta_), half.squaredNorm()};
}

double ArmLinearModel::ucb_score(const ContextVector& x, double alpha) const {
  const Prediction p = predict(x);
  return p.mean + alpha * std::sqrt(p.variance);
}

Eigen::VectorXd ArmLinearModel::sample_parameters(double noise_scale, Rng& rng) const {
  refresh();
  if (noise_scale == 0.0) return theta_;
  Eigen::VectorXd z(moment_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  // With A = L L^T, L^{-T} z has covariance A^{-1}.
  const Eigen::VectorXd dev = factor_.matrixU().solve(z);
  return theta_ + noise_scale * dev;
}

}  // namespace latent_bandit
