#pragma once

#include <string>
#include <vector>

#include "adaptens/panel.hpp"

namespace adaptens {

/// Point-forecast evaluation over one window: accuracy (MAE, RMSE, MAPE) and
/// tail risk (CVaR over absolute errors at 5% and 15%).
struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  double mape_percent = 0.0;
  double cvar05 = 0.0;
  double cvar15 = 0.0;
  Index n_cases = 0;

  static std::string csv_header();
  std::string csv_row() const;
  std::string json() const;  // one object, fixed key order
};

// Raised when any |y_t| falls under the MAPE guard; carries the offending
// row indices instead of silently dropping cases.
class MapeGuardError : public NumericalError {
 public:
  MapeGuardError(std::string what, std::vector<Index> rows)
      : NumericalError(std::move(what)), offending(std::move(rows)) {}
  std::vector<Index> offending;
};

inline constexpr double kMapeGuard = 1e-8;

double mae(const Vector& y, const Vector& y_hat);
double rmse(const Vector& y, const Vector& y_hat);
double mape(const Vector& y, const Vector& y_hat);  // percent

// Mean of the worst alpha-fraction of absolute errors, computed in closed
// form (sorted tail with fractional weighting). Equals the minimum over tau
// of tau + (1/(alpha*T)) * sum max(0, |e_t| - tau).
double cvar(const Vector& y, const Vector& y_hat, double alpha);

// Reference implementation: evaluates the tau objective at every distinct
// absolute error (the objective is piecewise linear with breakpoints there)
// and returns the minimum. Test oracle; independent of cvar().
double cvar_oracle(const Vector& y, const Vector& y_hat, double alpha);

MetricsReport evaluate(const Vector& y, const Vector& y_hat);

}  // namespace adaptens
