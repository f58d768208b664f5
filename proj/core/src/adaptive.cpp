#include "adaptens/adaptive.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <stdexcept>

namespace adaptens {

namespace {
constexpr double kTiny = 1e-300;
}

ErrorContext build_context(const Matrix& members, const TargetAccess& targets,
                           Index series_begin, Index t, int tau, int k) {
  if (tau < 1) throw std::invalid_argument("window tau must be >= 1");
  if (k < 1) throw std::invalid_argument("lead time k must be >= 1");
  if (t < 0 || t >= members.rows())
    throw std::invalid_argument("row index outside panel");

  const Index m = members.cols();
  ErrorContext ctx;
  ctx.window = tau;
  ctx.z = Vector::Zero(m * static_cast<Index>(tau));
  for (int j = 0; j < tau; ++j) {
    const Index s = t - k - tau + 1 + j;  // oldest slot first
    if (s < series_begin) {
      ++ctx.padded_steps;
      continue;
    }
    const double y_s = targets(s);
    ctx.z.segment(static_cast<Index>(j) * m, m) =
        members.row(s).transpose().array() - y_s;
  }
  return ctx;
}

ErrorContext build_context(const ForecastPanel& panel, Index t, int tau, int k) {
  const TargetAccess targets(panel.targets);
  return build_context(panel.members, targets, panel.segment_begin(t), t, tau, k);
}

AdaptiveFitProblem::AdaptiveFitProblem(Matrix design, Vector targets,
                                       Matrix contexts, Index m, int tau, int k,
                                       std::vector<std::string> member_names)
    : design_(std::move(design)),
      targets_(std::move(targets)),
      contexts_(std::move(contexts)),
      m_(m),
      tau_(tau),
      k_(k),
      member_names_(std::move(member_names)) {}

const Matrix& AdaptiveFitProblem::design_gram() const {
  if (!design_gram_) {
    const Index p = params();
    Matrix gram = Matrix::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(design_.transpose());
    design_gram_ = gram.selfadjointView<Eigen::Lower>();
  }
  return *design_gram_;
}

const Vector& AdaptiveFitProblem::design_rhs() const {
  if (!design_rhs_) design_rhs_ = design_.transpose() * targets_;
  return *design_rhs_;
}

const Matrix& AdaptiveFitProblem::regularizer_gram() const {
  if (!regularizer_gram_) {
    // Row block t of F is [I_m | I_m (x) Z_t'], so F'F assembles from
    // S1 = sum_t Z_t and S2 = sum_t Z_t Z_t' by Kronecker expansion.
    const Index mt = contexts_.cols();
    const Vector s1 = contexts_.colwise().sum();
    Matrix s2 = Matrix::Zero(mt, mt);
    s2.selfadjointView<Eigen::Lower>().rankUpdate(contexts_.transpose());
    s2 = s2.selfadjointView<Eigen::Lower>();

    const Index p = params();
    Matrix gram = Matrix::Zero(p, p);
    gram.topLeftCorner(m_, m_) =
        static_cast<double>(rows()) * Matrix::Identity(m_, m_);
    for (Index i = 0; i < m_; ++i) {
      gram.block(i, m_ + i * mt, 1, mt) = s1.transpose();
      gram.block(m_ + i * mt, i, mt, 1) = s1;
      gram.block(m_ + i * mt, m_ + i * mt, mt, mt) = s2;
    }
    regularizer_gram_ = std::move(gram);
  }
  return *regularizer_gram_;
}

double AdaptiveFitProblem::zero_threshold(bool force_static, double jitter) const {
  auto& cache = force_static ? zero_threshold_static_ : zero_threshold_full_;
  if (!cache) {
    const double r0 = targets_.norm();
    if (r0 <= 0.0) {
      cache = 0.0;
    } else {
      const Index active = force_static ? m_ : params();
      Matrix gf = regularizer_gram().topLeftCorner(active, active);
      gf.diagonal().array() += jitter * (1.0 + gf.diagonal().cwiseAbs().maxCoeff());
      Eigen::LLT<Matrix> llt(gf);
      if (llt.info() != Eigen::Success) {
        cache = std::numeric_limits<double>::infinity();
      } else {
        const Vector g = design_rhs().head(active) / r0;
        cache = std::sqrt(std::max(0.0, g.dot(llt.solve(g))));
      }
    }
  }
  return *cache;
}

Vector AdaptiveFitProblem::predictions(const Vector& theta) const {
  return design_ * theta;
}

Vector AdaptiveFitProblem::stacked_coefficients(const Vector& theta) const {
  const Index mt = contexts_.cols();
  Vector beta0 = theta.head(m_);
  Vector out(rows() * m_);
  for (Index t = 0; t < rows(); ++t) {
    for (Index i = 0; i < m_; ++i)
      out(t * m_ + i) =
          beta0(i) + theta.segment(m_ + i * mt, mt).dot(contexts_.row(t));
  }
  return out;
}

double AdaptiveFitProblem::coef_norm(const Vector& theta) const {
  const Matrix& gf = regularizer_gram();
  const double sq = theta.dot(gf * theta);
  return std::sqrt(std::max(0.0, sq));
}

AdaptiveFitProblem assemble_problem(const ForecastPanel& train, int tau,
                                    const AssembleOptions& options) {
  if (tau < 1) throw std::invalid_argument("window tau must be >= 1");
  const Index n = train.rows();
  const Index m = train.member_count();
  const int k = train.lead_time;
  const Index mt = m * static_cast<Index>(tau);
  const Index p = m + m * mt;
  if (p > options.max_parameters)
    throw std::invalid_argument(
        "adaptive problem needs " + std::to_string(p) + " parameters, above the cap of " +
        std::to_string(options.max_parameters) + "; reduce the window tau");
  if (!options.allow_underdetermined && n < p)
    throw std::invalid_argument(
        "training rows (" + std::to_string(n) + ") below parameter count (" +
        std::to_string(p) +
        "); reduce tau or enable the underdetermined override");

  Matrix contexts(n, mt);
  Matrix design(n, p);
  const TargetAccess targets(train.targets);
  for (Index t = 0; t < n; ++t) {
    const ErrorContext ctx = build_context(train.members, targets,
                                           train.segment_begin(t), t, tau, k);
    contexts.row(t) = ctx.z;
    design.block(t, 0, 1, m) = train.members.row(t);
    // Coefficient of V0(i, j) in X_t' V0 Z_t is X_t(i) * Z_t(j).
    for (Index i = 0; i < m; ++i)
      design.block(t, m + i * mt, 1, mt) = train.members(t, i) * ctx.z.transpose();
  }
  return AdaptiveFitProblem(std::move(design), train.targets, std::move(contexts),
                            m, tau, k, train.member_names);
}

const char* name(SolveMode mode) {
  return mode == SolveMode::faithful ? "faithful" : "squared";
}

SolveMode parse_solve_mode(const std::string& s) {
  if (s == "faithful") return SolveMode::faithful;
  if (s == "squared") return SolveMode::squared;
  throw std::invalid_argument("unknown solve mode '" + s + "'");
}

namespace {

// Factorization with the jitter fallback; solves M x = rhs on the active
// leading block (full system unless force_static).
struct BlockSolver {
  const Matrix& ga;
  const Matrix& gf;
  Index active;
  double jitter;
  double condition_hint = 0.0;

  Vector solve(double mu, const Vector& rhs) {
    Matrix m = ga.topLeftCorner(active, active) +
               mu * gf.topLeftCorner(active, active);
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
      m.diagonal().array() += jitter * (1.0 + m.diagonal().cwiseAbs().maxCoeff());
      llt.compute(m);
      if (llt.info() != Eigen::Success)
        throw NumericalError("adaptive normal equations not factorizable");
    }
    const auto& l = llt.matrixLLT();
    const double dmax = l.diagonal().maxCoeff();
    const double dmin = l.diagonal().minCoeff();
    condition_hint = (dmin > 0.0) ? (dmax / dmin) * (dmax / dmin) : 0.0;
    return llt.solve(rhs.head(active));
  }
};

Vector scatter(const Vector& active_theta, Index p) {
  Vector theta = Vector::Zero(p);
  theta.head(active_theta.size()) = active_theta;
  return theta;
}

}  // namespace

AdaptiveRule solve_adaptive_ridge(const AdaptiveFitProblem& problem,
                                  double lambda, const SolveOptions& options,
                                  FitDiagnostics* diagnostics) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (options.mode == SolveMode::faithful && lambda == 0.0)
    throw std::invalid_argument("faithful mode requires lambda > 0");

  const Index p = problem.params();
  const Index m = problem.member_count();
  const Index active = options.force_static ? m : p;
  const Matrix& ga = problem.design_gram();
  const Matrix& gf = problem.regularizer_gram();
  const Vector& rhs = problem.design_rhs();
  BlockSolver solver{ga, gf, active, options.jitter, 0.0};

  FitDiagnostics diag;
  Vector theta = Vector::Zero(p);

  auto finish = [&](double mu) {
    const double r = (problem.targets() - problem.predictions(theta)).norm();
    const double s = problem.coef_norm(theta);
    diag.mu = mu;
    diag.residual_norm = r;
    diag.coef_norm = s;
    diag.objective = r + lambda * s;
    diag.condition_hint = solver.condition_hint;
    if (r > kTiny && s > kTiny) {
      const Vector grad_fit = (ga * theta - rhs) / r;
      const Vector grad_reg = lambda * (gf * theta) / s;
      const double scale = grad_fit.norm() + grad_reg.norm();
      diag.stationarity =
          scale > kTiny ? (grad_fit + grad_reg).head(active).norm() / scale : 0.0;
    }
    if (diagnostics) *diagnostics = diag;

    AdaptiveRule rule;
    rule.beta0 = theta.head(m);
    const Index mt = problem.contexts().cols();
    rule.v0 = Matrix::Zero(m, mt);
    for (Index i = 0; i < m; ++i)
      rule.v0.row(i) = theta.segment(m + i * mt, mt);
    rule.window = problem.window();
    rule.lead_time = problem.lead_time();
    rule.lambda = lambda;
    rule.mode = options.mode;
    rule.member_names = problem.member_names();
    return rule;
  };

  if (options.mode == SolveMode::squared) {
    theta = scatter(solver.solve(lambda, rhs), p);
    diag.iterations = 1;
    return finish(lambda);
  }

  // Faithful mode. First the threshold test: theta = 0 is optimal when the
  // dual norm of the zero-residual gradient is at most lambda.
  if (problem.targets().norm() <= kTiny ||
      problem.zero_threshold(options.force_static, options.jitter) <= lambda) {
    diag.zero_solution = true;
    return finish(lambda);
  }

  double mu = lambda;
  theta = scatter(solver.solve(mu, rhs), p);
  diag.iterations = 1;
  diag.converged = false;
  for (int j = 0; j < options.max_iterations; ++j) {
    const double r = (problem.targets() - problem.predictions(theta)).norm();
    const double s = problem.coef_norm(theta);
    diag.objective_trace.push_back(r + lambda * s);
    if (s <= kTiny) {
      // Coefficients vanish identically; equivalent to the zero rule.
      diag.zero_solution = true;
      diag.converged = true;
      theta.setZero();
      break;
    }
    const double mu_next = lambda * r / s;
    if (std::abs(mu_next - mu) <= options.mu_tolerance * std::max(mu, kTiny)) {
      mu = mu_next;
      diag.converged = true;
      break;
    }
    mu = mu_next;
    theta = scatter(solver.solve(mu, rhs), p);
    ++diag.iterations;
  }
  return finish(mu);
}

RuleApplication apply_rule(const AdaptiveRule& rule,
                           const ForecastPanel& std_panel) {
  const Index n = std_panel.rows();
  const Index m = std_panel.member_count();
  if (m != rule.beta0.size())
    throw std::invalid_argument("panel member count does not match rule");
  RuleApplication out;
  out.predictions = Vector(n);
  out.weights = Matrix(n, m);
  const TargetAccess targets(std_panel.targets);
  for (Index t = 0; t < n; ++t) {
    const ErrorContext ctx =
        build_context(std_panel.members, targets, std_panel.segment_begin(t), t,
                      rule.window, rule.lead_time);
    const Vector beta = rule.coefficients(ctx.z);
    out.weights.row(t) = beta;
    out.predictions(t) = std_panel.members.row(t).dot(beta);
  }
  return out;
}

Matrix weights_trace(const AdaptiveRule& rule, const ForecastPanel& std_panel) {
  return apply_rule(rule, std_panel).weights;
}

std::string AdaptiveRule::to_json() const {
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["beta0"] = std::vector<double>(beta0.data(), beta0.data() + beta0.size());
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(v0.size()));
  for (Index i = 0; i < v0.rows(); ++i)
    for (Index j = 0; j < v0.cols(); ++j) flat.push_back(v0(i, j));
  doc["v0"] = flat;  // row-major
  doc["window"] = window;
  doc["lead_time"] = lead_time;
  doc["lambda"] = lambda;
  doc["mode"] = name(mode);
  doc["standardizer"] = {{"mu", scaler.mu}, {"sigma", scaler.sigma}};
  doc["members"] = member_names;
  return doc.dump(2);
}

AdaptiveRule AdaptiveRule::from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  if (!doc.contains("format_version") || doc["format_version"].get<int>() != 1)
    throw DataError("unsupported rule format version");
  AdaptiveRule rule;
  const auto b = doc["beta0"].get<std::vector<double>>();
  rule.beta0 = Eigen::Map<const Vector>(b.data(), static_cast<Index>(b.size()));
  rule.window = doc["window"].get<int>();
  rule.lead_time = doc["lead_time"].get<int>();
  rule.lambda = doc["lambda"].get<double>();
  rule.mode = parse_solve_mode(doc["mode"].get<std::string>());
  const Index m = rule.beta0.size();
  const Index mt = m * static_cast<Index>(rule.window);
  const auto flat = doc["v0"].get<std::vector<double>>();
  if (static_cast<Index>(flat.size()) != m * mt)
    throw DataError("rule v0 size does not match beta0 and window");
  rule.v0 = Matrix(m, mt);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < mt; ++j)
      rule.v0(i, j) = flat[static_cast<std::size_t>(i * mt + j)];
  rule.scaler.mu = doc["standardizer"]["mu"].get<double>();
  rule.scaler.sigma = doc["standardizer"]["sigma"].get<double>();
  rule.member_names = doc["members"].get<std::vector<std::string>>();
  return rule;
}

}  // namespace adaptens
