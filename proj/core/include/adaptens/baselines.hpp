#pragma once

#include <deque>
#include <functional>

#include "adaptens/metrics.hpp"
#include "adaptens/panel.hpp"

namespace adaptens {

/// Read probe for realized targets. Every target value consumed at
/// prediction time flows through one of these, so a test harness can observe
/// (and veto) exactly which rows an online method or context builder reads.
class TargetAccess {
 public:
  using Hook = std::function<void(Index)>;

  explicit TargetAccess(const Vector& y, Hook hook = nullptr, Index offset = 0)
      : y_(&y), hook_(std::move(hook)), offset_(offset) {}

  double operator()(Index i) const {
    if (hook_) hook_(offset_ + i);
    return (*y_)(i);
  }
  Index size() const { return y_->size(); }

 private:
  const Vector* y_;
  Hook hook_;
  Index offset_;  // added to indices reported to the hook (global row ids)
};

struct HindsightResult {
  Index member;  // lowest index on ties
  MetricsReport report;
};

// Best ensemble member on the given window by MAPE; a non-causal benchmark.
HindsightResult best_in_hindsight(const ForecastPanel& test);

// Equal-weight combination.
double ensemble_mean(const Eigen::Ref<const Vector>& x_t);

/// Exponential-weights combiner over windowed squared-error regrets.
/// Weights are exp(-eta * Regret_i) normalized to the simplex with
/// eta = sqrt(8 log(m) / window). Regrets are recomputed over the window of
/// the most recently revealed steps each time.
struct Exp3Config {
  int window = 8;  // t0: revealed steps entering the regret sums
};

class Exp3Combiner {
 public:
  Exp3Combiner(Index m, Exp3Config cfg);

  // Account a newly revealed step (forecasts and realized target).
  void observe(const Eigen::Ref<const Vector>& x, double y);
  // Series boundary: drop the regret window, keep the latest weights.
  void reset_window();

  const Vector& weights() const { return weights_; }
  double predict(const Eigen::Ref<const Vector>& x) const { return weights_.dot(x); }
  double eta() const { return eta_; }

 private:
  void recompute();

  Exp3Config cfg_;
  double eta_;
  std::deque<Vector> window_;  // per-member squared errors of revealed steps
  Vector weights_;             // on the simplex
};

/// Margin-based online update: leave the weights alone while the absolute
/// residual stays within the margin, otherwise step just far enough that the
/// residual lands exactly on the margin.
struct PaConfig {
  double margin = 0.0;  // epsilon
};

class PaCombiner {
 public:
  PaCombiner(Index m, PaConfig cfg);  // uniform 1/m start
  PaCombiner(Vector initial_weights, PaConfig cfg);

  void observe(const Eigen::Ref<const Vector>& x, double y);
  // Series boundary: weights carry over unchanged.
  void reset_window() {}
  const Vector& weights() const { return weights_; }
  double predict(const Eigen::Ref<const Vector>& x) const { return weights_.dot(x); }
  int skipped_updates() const { return skipped_; }

 private:
  PaConfig cfg_;
  Vector weights_;  // starts uniform 1/m
  int skipped_ = 0;
};

// Static ridge weights: solves (X^T X + lambda I) beta = X^T y with a stable
// factorization (no explicit inverse). lambda = 0 requires an invertible
// Gram matrix.
Vector ridge_fit(const Matrix& X, const Vector& y, double lambda);

}  // namespace adaptens
