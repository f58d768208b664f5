#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "adaptens/panel.hpp"

namespace adaptens {

enum class VectorNorm { l1, l2, linf };

const char* name(VectorNorm n);
VectorNorm parse_norm(const std::string& s);
VectorNorm dual(VectorNorm n);
double vec_norm(const Vector& v, VectorNorm n);

/// Ball of admissible data perturbations. Induced sets bound the operator
/// norm from the regularizer norm h to the loss norm g; Frobenius sets bound
/// the elementwise p-norm.
struct UncertaintySet {
  enum class Kind { induced, frobenius };
  Kind kind = Kind::induced;
  VectorNorm h = VectorNorm::l2;  // norm on the coefficients (regularizer side)
  VectorNorm g = VectorNorm::l2;  // norm on the loss
  double fro_p = 2.0;
  double radius = 1.0;  // lambda > 0

  static UncertaintySet induced(VectorNorm h, VectorNorm g, double lambda);
  static UncertaintySet frobenius(double p, double lambda);
  std::string label() const;
  // Norm of the loss the set pairs with (Frobenius p pairs with the
  // elementwise loss norm l_p); only p in {1,2,inf} is supported there.
  VectorNorm loss_norm() const;
  // Regularizer norm of the matching penalty: h for induced sets, the dual
  // exponent p* for Frobenius sets.
  VectorNorm regularizer_norm() const;
};

struct InducedNorm {
  double value = 0.0;
  bool exact = true;  // false: certified lower bound from random probes
};

// Operator norm from h to g. Closed forms: h = l1 (max column g-norm),
// (l2,l2) spectral, (linf,linf) max row l1. Other pairs fall back to a
// randomized lower bound and are flagged inexact.
InducedNorm induced_norm(const Matrix& delta, VectorNorm h, VectorNorm g,
                         int probes = 256, std::uint64_t seed = 0);

// Requires an exact norm for the set; throws otherwise.
double set_norm(const Matrix& delta, const UncertaintySet& set);

// v with h*(v) = 1 and v'beta = h(beta). Ties on the linf side break toward
// the lowest index. beta = 0 is rejected.
Vector dual_maximizer(const Vector& beta, VectorNorm h);

/// Rank-one perturbation attaining the worst case of g(z + Delta beta) over
/// the set, built exactly as in the equivalence proof, with its certificate.
struct WorstCasePerturbation {
  Matrix delta;
  double achieved = 0.0;  // g(z + delta * beta)
  double bound = 0.0;     // g(z) + lambda * h(beta)
  Vector certificate_v;
  bool zero_residual_branch = false;
};

WorstCasePerturbation worst_case_delta(const Vector& z, const Vector& beta,
                                       const UncertaintySet& set);

// Random matrix rescaled onto the boundary of the set.
Matrix sample_boundary(const UncertaintySet& set, Index rows, Index cols,
                       std::mt19937_64& rng);

// Block-diagonal design with X_t' as row t (T x T*m).
Matrix block_design(const Matrix& x);

/// Numerical check of min-max = regularized equivalence on one instance:
/// the constructive perturbation must attain g(y - X beta) + lambda h(beta)
/// and lie in the set; sampled feasible perturbations must never beat it.
struct EquivalenceReport {
  double lhs_constructive = 0.0;  // g(y - (X + Delta_hat) beta)
  double rhs = 0.0;               // g(y - X beta) + lambda h(beta)
  double membership_norm = 0.0;   // set norm of Delta_hat
  double max_sampled = 0.0;
  int samples = 0;
  double tolerance = 1e-9;
  bool construction_ok = false;
  bool membership_ok = false;
  bool sampling_ok = false;
  bool pass() const { return construction_ok && membership_ok && sampling_ok; }
  std::string json() const;
};

EquivalenceReport verify_equivalence(const Matrix& x_design, const Vector& y,
                                     const Vector& beta,
                                     const UncertaintySet& set,
                                     int n_samples = 10000,
                                     std::uint64_t seed = 0,
                                     double tolerance = 1e-9);

}  // namespace adaptens
