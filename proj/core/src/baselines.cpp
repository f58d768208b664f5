#include "adaptens/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <iostream>
#include <limits>

namespace adaptens {

HindsightResult best_in_hindsight(const ForecastPanel& test) {
  if (test.rows() < 1) throw std::invalid_argument("empty panel");
  Index best = -1;
  double best_mape = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < test.member_count(); ++k) {
    const double v = mape(test.targets, test.members.col(k));
    if (v < best_mape) {  // strict: ties keep the lowest index
      best_mape = v;
      best = k;
    }
  }
  return HindsightResult{best, evaluate(test.targets, test.members.col(best))};
}

double ensemble_mean(const Eigen::Ref<const Vector>& x_t) { return x_t.mean(); }

Exp3Combiner::Exp3Combiner(Index m, Exp3Config cfg) : cfg_(cfg) {
  if (m < 1) throw std::invalid_argument("member count must be >= 1");
  if (cfg_.window < 1) throw std::invalid_argument("exp3 window must be >= 1");
  eta_ = std::sqrt(8.0 * std::log(static_cast<double>(m)) /
                   static_cast<double>(cfg_.window));
  weights_ = Vector::Constant(m, 1.0 / static_cast<double>(m));
}

void Exp3Combiner::observe(const Eigen::Ref<const Vector>& x, double y) {
  window_.emplace_back((x.array() - y).square().matrix());
  while (static_cast<int>(window_.size()) > cfg_.window) window_.pop_front();
  recompute();
}

void Exp3Combiner::reset_window() { window_.clear(); }

void Exp3Combiner::recompute() {
  Vector regret = Vector::Zero(weights_.size());
  for (const auto& sq : window_) regret += sq;
  // Shift before exponentiating; softmax is invariant to it.
  const double shift = regret.minCoeff();
  Vector w = (-eta_ * (regret.array() - shift)).exp();
  weights_ = w / w.sum();
}

PaCombiner::PaCombiner(Index m, PaConfig cfg) : cfg_(cfg) {
  if (m < 1) throw std::invalid_argument("member count must be >= 1");
  if (cfg_.margin < 0.0) throw std::invalid_argument("margin must be >= 0");
  weights_ = Vector::Constant(m, 1.0 / static_cast<double>(m));
}

PaCombiner::PaCombiner(Vector initial_weights, PaConfig cfg)
    : cfg_(cfg), weights_(std::move(initial_weights)) {
  if (weights_.size() < 1) throw std::invalid_argument("member count must be >= 1");
  if (cfg_.margin < 0.0) throw std::invalid_argument("margin must be >= 0");
}

void PaCombiner::observe(const Eigen::Ref<const Vector>& x, double y) {
  const double residual = y - weights_.dot(x);
  const double excess = std::abs(residual) - cfg_.margin;
  if (excess <= 0.0) return;
  const double norm_sq = x.squaredNorm();
  if (norm_sq == 0.0) {
    ++skipped_;
    std::cerr << "warning: passive-aggressive update skipped, zero forecast vector\n";
    return;
  }
  const double tau = excess / norm_sq;
  weights_ += (residual > 0.0 ? 1.0 : -1.0) * tau * x;
}

Vector ridge_fit(const Matrix& X, const Vector& y, double lambda) {
  if (X.rows() != y.size())
    throw std::invalid_argument("design and target row counts differ");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const Index m = X.cols();
  Matrix gram = Matrix::Zero(m, m);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += lambda;
  const Vector rhs = X.transpose() * y;

  if (lambda > 0.0) {
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
    throw NumericalError("ridge system not positive definite");
  }
  Eigen::FullPivLU<Matrix> lu(gram);
  if (!lu.isInvertible())
    throw NumericalError("singular Gram matrix with lambda = 0");
  return lu.solve(rhs);
}

}  // namespace adaptens
