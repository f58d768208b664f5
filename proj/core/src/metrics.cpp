#include "adaptens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

namespace adaptens {

namespace {

void check_lengths(const Vector& y, const Vector& y_hat) {
  if (y.size() != y_hat.size())
    throw std::invalid_argument("metric inputs have different lengths");
  if (y.size() < 1) throw std::invalid_argument("metric inputs are empty");
}

// Round-trip precision: these rows are machine-consumed artifacts, and
// downstream recomputation must reproduce the exact doubles.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double mae(const Vector& y, const Vector& y_hat) {
  check_lengths(y, y_hat);
  return (y - y_hat).array().abs().mean();
}

double rmse(const Vector& y, const Vector& y_hat) {
  check_lengths(y, y_hat);
  return std::sqrt((y - y_hat).array().square().mean());
}

double mape(const Vector& y, const Vector& y_hat) {
  check_lengths(y, y_hat);
  std::vector<Index> bad;
  for (Index t = 0; t < y.size(); ++t)
    if (std::abs(y(t)) < kMapeGuard) bad.push_back(t);
  if (!bad.empty()) {
    std::string what = "MAPE undefined: |target| < 1e-8 at row(s)";
    for (std::size_t i = 0; i < bad.size() && i < 5; ++i)
      what += " " + std::to_string(bad[i]);
    if (bad.size() > 5) what += " ... (" + std::to_string(bad.size()) + " total)";
    throw MapeGuardError(what, bad);
  }
  return 100.0 * ((y - y_hat).array() / y.array()).abs().mean();
}

double cvar(const Vector& y, const Vector& y_hat, double alpha) {
  check_lengths(y, y_hat);
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0,1]");
  const Index n = y.size();
  const double k = alpha * static_cast<double>(n);
  // Full tail reduces to the MAE, computed in the same summation order so the
  // identity holds exactly.
  if (k >= static_cast<double>(n) - 1e-9) return mae(y, y_hat);

  std::vector<double> errors(static_cast<std::size_t>(n));
  for (Index t = 0; t < n; ++t) errors[static_cast<std::size_t>(t)] = std::abs(y(t) - y_hat(t));
  std::sort(errors.begin(), errors.end(), std::greater<>());

  const double whole = std::floor(k + 1e-9);
  const auto full = static_cast<std::size_t>(whole);
  double frac = k - whole;
  if (frac < 1e-9) frac = 0.0;

  double tail = 0.0;
  for (std::size_t i = 0; i < full; ++i) tail += errors[i];
  if (frac > 0.0 && full < errors.size()) tail += frac * errors[full];
  const double mass = (frac > 0.0) ? k : whole;
  return mass > 0.0 ? tail / mass : errors.front();
}

double cvar_oracle(const Vector& y, const Vector& y_hat, double alpha) {
  check_lengths(y, y_hat);
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0,1]");
  const Index n = y.size();
  Vector errors = (y - y_hat).array().abs();
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    const double tau = errors(i);
    const double excess = (errors.array() - tau).max(0.0).sum();
    best = std::min(best, tau + excess / (alpha * static_cast<double>(n)));
  }
  return best;
}

MetricsReport evaluate(const Vector& y, const Vector& y_hat) {
  MetricsReport r;
  r.mae = mae(y, y_hat);
  r.rmse = rmse(y, y_hat);
  r.mape_percent = mape(y, y_hat);
  r.cvar05 = cvar(y, y_hat, 0.05);
  r.cvar15 = cvar(y, y_hat, 0.15);
  r.n_cases = y.size();
  return r;
}

std::string MetricsReport::csv_header() {
  return "mae,rmse,mape_percent,cvar05,cvar15,n_cases";
}

std::string MetricsReport::csv_row() const {
  return fmt(mae) + "," + fmt(rmse) + "," + fmt(mape_percent) + "," +
         fmt(cvar05) + "," + fmt(cvar15) + "," + std::to_string(n_cases);
}

std::string MetricsReport::json() const {
  return std::string("{\"mae\":") + fmt(mae) + ",\"rmse\":" + fmt(rmse) +
         ",\"mape_percent\":" + fmt(mape_percent) + ",\"cvar05\":" + fmt(cvar05) +
         ",\"cvar15\":" + fmt(cvar15) + ",\"n_cases\":" + std::to_string(n_cases) + "}";
}

}  // namespace adaptens
