#include "adaptens/robustcheck.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace adaptens {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}
}  // namespace

const char* name(VectorNorm n) {
  switch (n) {
    case VectorNorm::l1: return "l1";
    case VectorNorm::l2: return "l2";
    case VectorNorm::linf: return "linf";
  }
  return "?";
}

VectorNorm parse_norm(const std::string& s) {
  if (s == "l1" || s == "1") return VectorNorm::l1;
  if (s == "l2" || s == "2") return VectorNorm::l2;
  if (s == "linf" || s == "inf") return VectorNorm::linf;
  throw std::invalid_argument("unknown norm '" + s + "'");
}

VectorNorm dual(VectorNorm n) {
  switch (n) {
    case VectorNorm::l1: return VectorNorm::linf;
    case VectorNorm::l2: return VectorNorm::l2;
    case VectorNorm::linf: return VectorNorm::l1;
  }
  return VectorNorm::l2;
}

double vec_norm(const Vector& v, VectorNorm n) {
  switch (n) {
    case VectorNorm::l1: return v.lpNorm<1>();
    case VectorNorm::l2: return v.norm();
    case VectorNorm::linf: return v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

UncertaintySet UncertaintySet::induced(VectorNorm h, VectorNorm g, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("radius must be non-negative");
  UncertaintySet s;
  s.kind = Kind::induced;
  s.h = h;
  s.g = g;
  s.radius = lambda;
  return s;
}

UncertaintySet UncertaintySet::frobenius(double p, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("radius must be non-negative");
  if (!(p >= 1.0)) throw std::invalid_argument("frobenius exponent must be >= 1");
  UncertaintySet s;
  s.kind = Kind::frobenius;
  s.fro_p = p;
  s.radius = lambda;
  return s;
}

std::string UncertaintySet::label() const {
  if (kind == Kind::frobenius) {
    if (std::isinf(fro_p)) return "frobenius-inf";
    return "frobenius-" + std::to_string(static_cast<int>(fro_p));
  }
  return std::string("induced(") + name(h) + "," + name(g) + ")";
}

VectorNorm UncertaintySet::loss_norm() const {
  if (kind == Kind::induced) return g;
  if (fro_p == 1.0) return VectorNorm::l1;
  if (fro_p == 2.0) return VectorNorm::l2;
  if (std::isinf(fro_p)) return VectorNorm::linf;
  throw std::invalid_argument("frobenius exponent must be 1, 2 or inf here");
}

VectorNorm UncertaintySet::regularizer_norm() const {
  if (kind == Kind::induced) return h;
  return dual(loss_norm());  // 1/p + 1/p* = 1
}

InducedNorm induced_norm(const Matrix& delta, VectorNorm h, VectorNorm g,
                         int probes, std::uint64_t seed) {
  // h = l1: the unit ball's extreme points are +-e_j, so the norm is the
  // largest g-norm of a column.
  if (h == VectorNorm::l1) {
    double best = 0.0;
    for (Index j = 0; j < delta.cols(); ++j)
      best = std::max(best, vec_norm(delta.col(j), g));
    return {best, true};
  }
  if (h == VectorNorm::l2 && g == VectorNorm::l2) {
    if (delta.size() == 0) return {0.0, true};
    Eigen::JacobiSVD<Matrix> svd(delta);
    return {svd.singularValues()(0), true};
  }
  if (h == VectorNorm::linf && g == VectorNorm::linf) {
    double best = 0.0;
    for (Index i = 0; i < delta.rows(); ++i)
      best = std::max(best, delta.row(i).lpNorm<1>());
    return {best, true};
  }
  // Certified lower bound: max over random probes of g(delta v) / h(v).
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  double best = 0.0;
  for (int i = 0; i < probes; ++i) {
    Vector v(delta.cols());
    for (Index j = 0; j < v.size(); ++j) v(j) = normal(rng);
    const double hv = vec_norm(v, h);
    if (hv == 0.0) continue;
    best = std::max(best, vec_norm(delta * v, g) / hv);
  }
  return {best, false};
}

double set_norm(const Matrix& delta, const UncertaintySet& set) {
  if (set.kind == UncertaintySet::Kind::frobenius) {
    if (std::isinf(set.fro_p)) return delta.cwiseAbs().maxCoeff();
    return std::pow(delta.cwiseAbs().array().pow(set.fro_p).sum(), 1.0 / set.fro_p);
  }
  const InducedNorm n = induced_norm(delta, set.h, set.g);
  if (!n.exact)
    throw std::invalid_argument("no exact induced norm for pair (" +
                                std::string(name(set.h)) + "," + name(set.g) + ")");
  return n.value;
}

Vector dual_maximizer(const Vector& beta, VectorNorm h) {
  if (beta.size() == 0 || beta.isZero(0.0))
    throw std::invalid_argument("dual maximizer undefined for beta = 0");
  switch (h) {
    case VectorNorm::l2:
      return beta / beta.norm();
    case VectorNorm::l1: {
      // h* = linf: the full sign pattern reaches |beta|_1.
      Vector v(beta.size());
      for (Index i = 0; i < beta.size(); ++i)
        v(i) = beta(i) > 0.0 ? 1.0 : (beta(i) < 0.0 ? -1.0 : 0.0);
      return v;
    }
    case VectorNorm::linf: {
      // h* = l1: a single unit mass on a max-magnitude coordinate,
      // lowest index on ties.
      Index best = 0;
      for (Index i = 1; i < beta.size(); ++i)
        if (std::abs(beta(i)) > std::abs(beta(best))) best = i;
      Vector v = Vector::Zero(beta.size());
      v(best) = beta(best) >= 0.0 ? 1.0 : -1.0;
      return v;
    }
  }
  throw std::logic_error("unreachable");
}

WorstCasePerturbation worst_case_delta(const Vector& z, const Vector& beta,
                                       const UncertaintySet& set) {
  const VectorNorm g = set.loss_norm();
  const VectorNorm h = set.regularizer_norm();
  const double lambda = set.radius;

  WorstCasePerturbation out;
  out.bound = vec_norm(z, g) + lambda * vec_norm(beta, h);

  if (beta.isZero(0.0) || lambda == 0.0) {
    out.delta = Matrix::Zero(z.size(), beta.size());
    out.achieved = vec_norm(z, g);
    out.certificate_v = Vector::Zero(beta.size());
    return out;
  }

  const Vector v = dual_maximizer(beta, h);
  const double gz = vec_norm(z, g);
  if (gz > 0.0) {
    out.delta = (lambda / gz) * z * v.transpose();
  } else {
    // Zero-residual branch: any direction u with g(u) = 1 works.
    Vector u = Vector::Zero(z.size());
    u(0) = 1.0;
    out.delta = lambda * u * v.transpose();
    out.zero_residual_branch = true;
  }
  out.achieved = vec_norm(z + out.delta * beta, g);
  out.certificate_v = v;
  return out;
}

Matrix sample_boundary(const UncertaintySet& set, Index rows, Index cols,
                       std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix r(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) r(i, j) = normal(rng);
  const double norm = set_norm(r, set);
  if (norm == 0.0) return Matrix::Zero(rows, cols);
  return (set.radius / norm) * r;
}

Matrix block_design(const Matrix& x) {
  const Index t = x.rows();
  const Index m = x.cols();
  Matrix out = Matrix::Zero(t, t * m);
  for (Index i = 0; i < t; ++i) out.block(i, i * m, 1, m) = x.row(i);
  return out;
}

EquivalenceReport verify_equivalence(const Matrix& x_design, const Vector& y,
                                     const Vector& beta,
                                     const UncertaintySet& set, int n_samples,
                                     std::uint64_t seed, double tolerance) {
  if (x_design.rows() != y.size() || x_design.cols() != beta.size())
    throw std::invalid_argument("design, target and coefficient sizes disagree");

  const VectorNorm g = set.loss_norm();
  const Vector z = y - x_design * beta;

  EquivalenceReport report;
  report.tolerance = tolerance;
  report.samples = n_samples;
  report.rhs = vec_norm(z, g) + set.radius * vec_norm(beta, set.regularizer_norm());

  // The lemma's construction maximizes g(z + Delta beta); the regression
  // residual is z - Delta beta, so the sign flips.
  const WorstCasePerturbation wc = worst_case_delta(z, beta, set);
  const Matrix delta_hat = -wc.delta;
  report.lhs_constructive = vec_norm(y - (x_design + delta_hat) * beta, g);
  report.membership_norm = set_norm(delta_hat, set);
  report.construction_ok =
      std::abs(report.lhs_constructive - report.rhs) <= tolerance;
  report.membership_ok =
      report.membership_norm <= set.radius * (1.0 + tolerance) + tolerance;

  std::mt19937_64 rng(seed);
  double worst = report.lhs_constructive;
  bool sampling_ok = true;
  for (int i = 0; i < n_samples; ++i) {
    const Matrix delta = sample_boundary(set, x_design.rows(), x_design.cols(), rng);
    const double value = vec_norm(y - (x_design + delta) * beta, g);
    worst = std::max(worst, value);
    if (value > report.rhs + tolerance) sampling_ok = false;
  }
  report.max_sampled = worst;
  report.sampling_ok = sampling_ok;
  return report;
}

std::string EquivalenceReport::json() const {
  std::string s = "{";
  s += "\"lhs_constructive\":" + fmt(lhs_constructive);
  s += ",\"rhs\":" + fmt(rhs);
  s += ",\"membership_norm\":" + fmt(membership_norm);
  s += ",\"max_sampled\":" + fmt(max_sampled);
  s += ",\"samples\":" + std::to_string(samples);
  s += ",\"construction_ok\":" + std::string(construction_ok ? "true" : "false");
  s += ",\"membership_ok\":" + std::string(membership_ok ? "true" : "false");
  s += ",\"sampling_ok\":" + std::string(sampling_ok ? "true" : "false");
  s += ",\"pass\":" + std::string(pass() ? "true" : "false");
  s += "}";
  return s;
}

}  // namespace adaptens
