#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adaptens/baselines.hpp"
#include "adaptens/panel.hpp"

namespace adaptens {

/// Lagged-error vector Z_t: the tau most recent realized member error
/// vectors X_s - y_s * e available when predicting step t under lead time k,
/// i.e. steps t-k-tau+1 .. t-k, concatenated oldest first. Slots before the
/// start of the series are zero (no evidence of error), so the decision rule
/// falls back to its base coefficients at series starts.
struct ErrorContext {
  Vector z;              // length m * tau
  int window = 0;        // tau
  int padded_steps = 0;  // leading window slots that fell before the series
  bool fully_padded() const { return padded_steps >= window; }
};

ErrorContext build_context(const ForecastPanel& panel, Index t, int tau, int k);
ErrorContext build_context(const Matrix& members, const TargetAccess& targets,
                           Index series_begin, Index t, int tau, int k);

struct AssembleOptions {
  // Permit fewer training rows than parameters (the overfitting regime is
  // surfaced, not forbidden).
  bool allow_underdetermined = false;
  Index max_parameters = 20000;  // hard cap on m + m^2 * tau
};

/// Flattened least-squares form of the adaptive ensemble fit. The parameter
/// vector is theta = [beta0 | V0 row-major], length p = m + m^2*tau. Row t
/// of the design satisfies design.row(t) * theta = X_t' (beta0 + V0 Z_t),
/// and the regularizer map stacks the per-step coefficients so that
/// |F theta|_2 is the norm of the stacked beta over the decision rule.
class AdaptiveFitProblem {
 public:
  AdaptiveFitProblem(Matrix design, Vector targets, Matrix contexts, Index m,
                     int tau, int k, std::vector<std::string> member_names);

  Index rows() const { return design_.rows(); }
  Index member_count() const { return m_; }
  int window() const { return tau_; }
  int lead_time() const { return k_; }
  Index params() const { return m_ + m_ * m_ * static_cast<Index>(tau_); }
  const Matrix& design() const { return design_; }
  const Vector& targets() const { return targets_; }
  const Matrix& contexts() const { return contexts_; }
  const std::vector<std::string>& member_names() const { return member_names_; }

  // Gram pieces, computed once and reused across solves. Not thread-safe on
  // first access; a problem instance belongs to one fitting thread.
  const Matrix& design_gram() const;       // A' A
  const Vector& design_rhs() const;        // A' y
  const Matrix& regularizer_gram() const;  // F' F

  // Dual threshold of the norm-sum objective at zero: theta = 0 minimizes
  // |y - A theta|_2 + lambda |F theta|_2 exactly when this value does not
  // exceed lambda. Independent of lambda, so it is cached.
  double zero_threshold(bool force_static = false, double jitter = 1e-10) const;

  Vector predictions(const Vector& theta) const;           // A theta
  Vector stacked_coefficients(const Vector& theta) const;  // F theta, length T*m
  double coef_norm(const Vector& theta) const;             // |F theta|_2

 private:
  Matrix design_;
  Vector targets_;
  Matrix contexts_;  // T x (m*tau)
  Index m_;
  int tau_;
  int k_;
  std::vector<std::string> member_names_;
  mutable std::optional<Matrix> design_gram_;
  mutable std::optional<Vector> design_rhs_;
  mutable std::optional<Matrix> regularizer_gram_;
  mutable std::optional<double> zero_threshold_full_;
  mutable std::optional<double> zero_threshold_static_;
};

// Builds the flattened problem from a (standardized) training panel.
// Contexts never cross series boundaries; lead time comes from the panel.
AdaptiveFitProblem assemble_problem(const ForecastPanel& train, int tau,
                                    const AssembleOptions& options = {});

enum class SolveMode { faithful, squared };
const char* name(SolveMode mode);
SolveMode parse_solve_mode(const std::string& s);

struct SolveOptions {
  SolveMode mode = SolveMode::faithful;
  int max_iterations = 100;    // fixed-point cap (faithful mode)
  double mu_tolerance = 1e-9;  // relative change in mu that stops the loop
  double jitter = 1e-10;       // diagonal fallback when a factorization fails
  bool force_static = false;   // pin V0 = 0; solves the leading m-block only
};

struct FitDiagnostics {
  int iterations = 0;      // squared solves performed
  bool converged = true;   // fixed point reached within max_iterations
  double mu = 0.0;         // effective squared-mode weight at the solution
  double residual_norm = 0.0;  // |y - A theta|
  double coef_norm = 0.0;      // |F theta|
  double objective = 0.0;      // residual_norm + lambda * coef_norm
  double stationarity = 0.0;   // relative first-order residual (faithful)
  double condition_hint = 0.0; // rough kappa bound from the last factorization
  std::vector<double> objective_trace;  // objective after every iterate
  bool zero_solution = false;  // dual threshold test returned theta = 0
};

/// Fitted affine decision rule: beta_t(Z) = beta0 + V0 * Z_t.
struct AdaptiveRule {
  Vector beta0;  // m
  Matrix v0;     // m x (m*tau)
  int window = 1;
  int lead_time = 1;
  double lambda = 0.0;
  SolveMode mode = SolveMode::faithful;
  Standardizer scaler;  // transform the rule was fit under
  std::vector<std::string> member_names;

  Vector coefficients(const Vector& z) const { return beta0 + v0 * z; }
  // Standardized-scale prediction.
  double predict(const Eigen::Ref<const Vector>& x, const Vector& z) const {
    return x.dot(coefficients(z));
  }
  // Original-scale prediction from original-scale forecasts and context
  // errors; routes through the stored standardizer both ways.
  double predict_raw(const Vector& x_raw, const Vector& z_raw) const {
    const Vector x = (x_raw.array() - scaler.mu) / scaler.sigma;
    return scaler.to_raw(predict(x, z_raw / scaler.sigma));
  }

  std::string to_json() const;  // versioned document
  static AdaptiveRule from_json(const std::string& text);
};

/// Minimizes the norm-sum objective |y - A theta|_2 + lambda |F theta|_2
/// (faithful mode) or the squared problem (A'A + mu F'F) theta = A'y for
/// mu = lambda (squared mode).
///
/// Faithful mode runs a majorize-minimize fixed point over the squared
/// problem: mu_{j+1} = lambda * |y - A theta_j| / |F theta_j|, which makes
/// the objective non-increasing across iterates. When the dual-norm
/// threshold test certifies that theta = 0 is optimal (the regularizer
/// dominates), the zero rule is returned directly.
AdaptiveRule solve_adaptive_ridge(const AdaptiveFitProblem& problem,
                                  double lambda,
                                  const SolveOptions& options = {},
                                  FitDiagnostics* diagnostics = nullptr);

/// Rule applied across a standardized panel: per-row contexts, coefficients,
/// and standardized predictions.
struct RuleApplication {
  Vector predictions;  // standardized scale
  Matrix weights;      // rows = beta_t
};
RuleApplication apply_rule(const AdaptiveRule& rule,
                           const ForecastPanel& std_panel);

// Per-step coefficient vectors for diagnostics and plot emission.
Matrix weights_trace(const AdaptiveRule& rule, const ForecastPanel& std_panel);

}  // namespace adaptens
