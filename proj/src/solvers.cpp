#include "erfmin/solvers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace erfmin {

namespace {

constexpr double kSigmaFloor = 1e-12;
constexpr double kFallbackMu = 1e-8;

double sign(double t) { return (t > 0.0) - (t < 0.0); }

void validate_config(const SolverConfig& cfg) {
  if (!(cfg.tau >= 0.0)) throw std::invalid_argument("SolverConfig: tau must be non-negative");
  if (!(cfg.p > 0.0) || cfg.p > 1.0)
    throw std::invalid_argument("SolverConfig: p must lie in (0, 1]");
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0))
    throw std::invalid_argument("SolverConfig: alpha must lie in (0, 1)");
  if (cfg.sigma0 < 0.0) throw std::invalid_argument("SolverConfig: sigma0 must be >= 0");
  if (cfg.max_iters < 0) throw std::invalid_argument("SolverConfig: max_iters must be >= 0");
  if (cfg.newton_inner_iters < 1)
    throw std::invalid_argument("SolverConfig: newton_inner_iters must be >= 1");
  if (cfg.stop_tol < 0.0) throw std::invalid_argument("SolverConfig: stop_tol must be >= 0");
  if (cfg.debris_kappa < 0.0)
    throw std::invalid_argument("SolverConfig: debris_kappa must be >= 0");
}

double auto_sigma0(const SolverConfig& cfg, const Eigen::VectorXd& x0) {
  if (cfg.sigma0 > 0.0) return cfg.sigma0;
  double xinf = x0.size() > 0 ? x0.lpNorm<Eigen::Infinity>() : 0.0;
  return 0.1 * std::max(1.0, xinf);
}

// Sparsification stage shared by the smooth-surrogate solvers.
//
// For the Soft rule the shrink level is compensated for the smoothing width:
//   lambda_k = 2 mu tau max(0, 1 - |d1(kind, x_k, sigma)|),
// evaluated at the pre-step iterate x.  With this level the shrink removes
// exactly the part of the F1 subgradient that the smooth surrogate's gradient
// has not already injected, so the exact Lasso fixed point is stationary for
// every sigma; a plain level-tau shrink would keep the support moving while
// sigma anneals and stall the iteration far from the minimizer.
//
// Afterwards, components with |x_k| <= debris_kappa * sigma are zeroed: they
// are below the resolution of the surrogate at the current smoothing width
// (the smoothers are flat there), so they carry no signal, yet they would
// survive the compensated shrink, inflate the support, and pollute warm
// starts.  debris_kappa = 0 disables this.
Eigen::VectorXd threshold_stage(const ProblemData& prob, const SolverConfig& cfg,
                                const Eigen::VectorXd& x_pre, const Eigen::VectorXd& y,
                                double mu, double sigma) {
  Eigen::VectorXd out;
  switch (cfg.threshold) {
    case ThresholdRule::Soft: {
      out.resize(y.size());
      for (Eigen::Index k = 0; k < y.size(); ++k) {
        double d1 = std::abs(smooth_abs(cfg.kind, x_pre[k], sigma).d1);
        double lam = 2.0 * mu * cfg.tau * std::max(0.0, 1.0 - d1);
        double a = std::abs(y[k]) - lam;
        out[k] = a > 0.0 ? sign(y[k]) * a : 0.0;
      }
      break;
    }
    case ThresholdRule::Hard:
      out = hard_threshold(y, cfg.tau);
      break;
    case ThresholdRule::Optimality:
      out = optimality_threshold(prob, y, cfg.tau);
      break;
  }
  if (cfg.debris_kappa > 0.0) {
    double floor = cfg.debris_kappa * sigma;
    for (Eigen::Index k = 0; k < out.size(); ++k) {
      if (std::abs(out[k]) <= floor) out[k] = 0.0;
    }
  }
  return out;
}

// Line-search dispatch with the degenerate-step fallback chain: a
// TaylorHessian/SecantFD step that is non-positive or non-finite is replaced
// by backtracking from mu0 = 1; a backtracking run that exhausts its budget
// yields mu = 1e-8 and flags the trace record.
double run_line_search(const ProblemData& prob, const SolverConfig& cfg,
                       const ObjectiveSpec& spec, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& g, const Eigen::VectorXd& s,
                       bool* fallback_flag) {
  *fallback_flag = false;
  ValueFn value_fn = [&](const Eigen::VectorXd& z) { return h_value(prob, spec, z); };

  double mu = std::numeric_limits<double>::quiet_NaN();
  if (cfg.line_search.method == LineSearchMethod::TaylorHessian) {
    try {
      mu = taylor_hessian_step(g, h_hessian(prob, spec, x), s);
    } catch (const std::runtime_error&) {
      mu = std::numeric_limits<double>::quiet_NaN();
    }
  } else if (cfg.line_search.method == LineSearchMethod::SecantFD) {
    GradFn grad_fn = [&](const Eigen::VectorXd& z) { return h_gradient(prob, spec, z); };
    double xi = cfg.line_search.xi_scale *
                (1.0 + x.norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(x.size(), 1))));
    try {
      mu = secant_fd_step(grad_fn, x, s, xi);
    } catch (const std::runtime_error&) {
      mu = std::numeric_limits<double>::quiet_NaN();
    }
  }

  if (std::isfinite(mu) && mu > 0.0) return mu;

  LineSearchConfig bt = cfg.line_search;
  if (cfg.line_search.method != LineSearchMethod::Backtracking) bt.mu0 = 1.0;
  bool accepted = false;
  mu = backtracking(value_fn, g, x, s, bt, &accepted);
  if (!accepted) {
    mu = kFallbackMu;
    *fallback_flag = true;
  }
  return mu;
}

void push_record(IterateTrace& trace, const ProblemData& prob, const SolverConfig& cfg,
                 int iteration, double sigma, const Eigen::VectorXd& xn, double mu,
                 double beta, bool beta_clamped, bool ls_fallback) {
  IterateRecord r;
  r.iteration = iteration;
  r.sigma = sigma;
  Eigen::VectorXd res = prob.A * xn - prob.b;
  double rsq = res.squaredNorm();
  double reg;
  if (cfg.p == 1.0) {
    reg = 0.0;
    for (Eigen::Index k = 0; k < xn.size(); ++k) {
      reg += smooth_abs(cfg.kind, xn[k], sigma).value;
    }
  } else {
    reg = g_p_sigma(xn, cfg.p, sigma);
  }
  r.h_value = rsq + 2.0 * cfg.tau * reg;
  r.f1_value = rsq + 2.0 * cfg.tau * xn.lpNorm<1>();
  r.residual_norm = std::sqrt(rsq);
  r.mu = mu;
  r.nnz = (xn.array() != 0.0).count();
  r.beta = beta;
  r.beta_clamped = beta_clamped;
  r.ls_fallback = ls_fallback;
  trace.push_back(r);
  if (!std::isfinite(r.h_value) || !xn.allFinite()) {
    throw NumericalDivergence("solver diverged (non-finite iterate or objective) at iteration " +
                                  std::to_string(iteration),
                              trace);
  }
}

bool should_stop(const SolverConfig& cfg, const Eigen::VectorXd& x_old,
                 const Eigen::VectorXd& x_new) {
  if (cfg.stop_tol <= 0.0) return false;
  return (x_new - x_old).norm() <= cfg.stop_tol * (1.0 + x_old.norm());
}

}  // namespace

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: tau must be >= 0");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    double a = std::abs(x[k]) - tau;
    out[k] = a > 0.0 ? sign(x[k]) * a : 0.0;
  }
  return out;
}

Eigen::VectorXd hard_threshold(const Eigen::VectorXd& x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("hard_threshold: tau must be >= 0");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    out[k] = std::abs(x[k]) > tau ? x[k] : 0.0;
  }
  return out;
}

Eigen::VectorXd optimality_threshold(const ProblemData& prob, const Eigen::VectorXd& x,
                                     double tau) {
  if (x.size() != prob.n()) {
    throw std::invalid_argument("optimality_threshold: x has wrong dimension");
  }
  Eigen::VectorXd v = prob.atb - prob.gram * x;  // A^T (b - A x)
  Eigen::VectorXd out = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (std::abs(v[k]) <= tau) out[k] = 0.0;
  }
  return out;
}

double polak_ribiere_beta(const Eigen::VectorXd& g_new, const Eigen::VectorXd& g_old) {
  double den = g_old.squaredNorm();
  if (den < 1e-300) {
    throw std::runtime_error("polak_ribiere_beta: previous gradient is numerically zero");
  }
  return std::max(g_new.dot(g_new - g_old) / den, 0.0);
}

SolveResult steepest_descent(const ProblemData& prob, const SolverConfig& cfg,
                             const Eigen::VectorXd& x0) {
  validate_config(cfg);
  Eigen::VectorXd x = x0;
  double sigma = auto_sigma0(cfg, x0);
  IterateTrace trace;
  for (int n = 0; n < cfg.max_iters; ++n) {
    ObjectiveSpec spec{cfg.p, cfg.tau, sigma, cfg.kind};
    Eigen::VectorXd g = h_gradient(prob, spec, x);
    Eigen::VectorXd s = -g;
    bool fallback = false;
    double mu = run_line_search(prob, cfg, spec, x, g, s, &fallback);
    Eigen::VectorXd xn = threshold_stage(prob, cfg, x, x + mu * s, mu, sigma);
    push_record(trace, prob, cfg, n, sigma, xn, mu, 0.0, false, fallback);
    bool stop = should_stop(cfg, x, xn);
    x = std::move(xn);
    sigma = std::max(cfg.alpha * sigma, kSigmaFloor);
    if (stop) break;
  }
  return {std::move(x), std::move(trace)};
}

SolveResult nonlinear_cg(const ProblemData& prob, const SolverConfig& cfg,
                         const Eigen::VectorXd& x0) {
  validate_config(cfg);
  Eigen::VectorXd x = x0;
  double sigma = auto_sigma0(cfg, x0);
  IterateTrace trace;
  Eigen::VectorXd x_prev, d;
  bool have_prev = false;
  for (int n = 0; n < cfg.max_iters; ++n) {
    ObjectiveSpec spec{cfg.p, cfg.tau, sigma, cfg.kind};
    Eigen::VectorXd g = h_gradient(prob, spec, x);
    double beta = 0.0;
    bool clamped = false;
    if (!have_prev || cfg.force_beta_zero) {
      d = -g;
    } else {
      // Both gradients are taken at the current (post-anneal) sigma — the
      // width this direction will actually be used under.  Mixing gradients
      // from two different widths makes beta compare slopes of two different
      // surfaces and measurably degrades the direction quality.
      Eigen::VectorXd g_prev = h_gradient(prob, spec, x_prev);
      double den = g_prev.squaredNorm();
      if (den < 1e-300) {
        d = -g;  // degenerate previous gradient: restart with steepest descent
      } else {
        double raw = g.dot(g - g_prev) / den;
        beta = std::max(raw, 0.0);
        clamped = raw < 0.0;
        d = -g + beta * d;
        if (g.dot(d) >= 0.0) {  // not a descent direction: restart
          d = -g;
          beta = 0.0;
        }
      }
    }
    bool fallback = false;
    double mu = run_line_search(prob, cfg, spec, x, g, d, &fallback);
    Eigen::VectorXd xn = threshold_stage(prob, cfg, x, x + mu * d, mu, sigma);
    push_record(trace, prob, cfg, n, sigma, xn, mu, beta, clamped, fallback);
    bool stop = should_stop(cfg, x, xn);
    x_prev = std::move(x);
    x = std::move(xn);
    have_prev = true;
    sigma = std::max(cfg.alpha * sigma, kSigmaFloor);
    if (stop) break;
  }
  return {std::move(x), std::move(trace)};
}

SolveResult newton(const ProblemData& prob, const SolverConfig& cfg,
                   const Eigen::VectorXd& x0) {
  validate_config(cfg);
  Eigen::VectorXd x = x0;
  double sigma = auto_sigma0(cfg, x0);
  IterateTrace trace;
  for (int n = 0; n < cfg.max_iters; ++n) {
    ObjectiveSpec spec{cfg.p, cfg.tau, sigma, cfg.kind};
    Eigen::VectorXd g = h_gradient(prob, spec, x);
    HessianOperator H = h_hessian(prob, spec, x);

    // Inner linear CG on H dx = -g, run matrix-free.  A non-positive
    // curvature direction ends the inner solve (the operator may be
    // indefinite away from convergence for p < 1).
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(x.size());
    Eigen::VectorXd r = -g;
    Eigen::VectorXd pdir = r;
    double rr = r.squaredNorm();
    const double tol2 = cfg.newton_tol * cfg.newton_tol * g.squaredNorm();
    for (int i = 0; i < cfg.newton_inner_iters && rr > tol2; ++i) {
      Eigen::VectorXd Hp = H.apply(pdir);
      double pHp = pdir.dot(Hp);
      if (!(pHp > 0.0)) {
        if (i == 0) dx = r;  // fall back to the gradient direction
        break;
      }
      double a = rr / pHp;
      dx += a * pdir;
      r -= a * Hp;
      double rr_new = r.squaredNorm();
      pdir = r + (rr_new / rr) * pdir;
      rr = rr_new;
    }
    if (!dx.allFinite()) {
      throw NumericalDivergence("newton: inner solve produced a non-finite step at iteration " +
                                    std::to_string(n),
                                trace);
    }
    if (dx.dot(g) >= 0.0) dx = -g;  // keep a descent direction

    bool fallback = false;
    double mu = run_line_search(prob, cfg, spec, x, g, dx, &fallback);
    Eigen::VectorXd xn = threshold_stage(prob, cfg, x, x + mu * dx, mu, sigma);
    push_record(trace, prob, cfg, n, sigma, xn, mu, 0.0, false, fallback);
    bool stop = should_stop(cfg, x, xn);
    x = std::move(xn);
    sigma = std::max(cfg.alpha * sigma, kSigmaFloor);
    if (stop) break;
  }
  return {std::move(x), std::move(trace)};
}

namespace {

// Largest singular value of A estimated with 50 power iterations on the
// cached Gram matrix, started from a deterministic vector.
double spectral_norm_estimate(const ProblemData& prob) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(prob.n());
  v /= v.norm();
  double lambda = 0.0;
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd w = prob.gram * v;
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    lambda = nw;
  }
  return std::sqrt(lambda);
}

double ista_scale(const ProblemData& prob) {
  double snorm = spectral_norm_estimate(prob);
  return snorm <= 1.0 ? 1.0 : 1.01 * snorm;
}

}  // namespace

Eigen::VectorXd ista(const ProblemData& prob, double tau, int max_iters,
                     const Eigen::VectorXd& x0) {
  if (tau < 0.0) throw std::invalid_argument("ista: tau must be >= 0");
  const double s = ista_scale(prob);  // >= 1 by construction
  const double s2 = s * s;
  const double tau_s = tau / s2;
  Eigen::VectorXd x = x0;
  for (int k = 0; k < max_iters; ++k) {
    x = soft_threshold(x + (prob.atb - prob.gram * x) / s2, tau_s);
    if (!x.allFinite()) {
      throw std::runtime_error("ista: iterate became non-finite at iteration " +
                               std::to_string(k));
    }
  }
  return x;
}

Eigen::VectorXd fista(const ProblemData& prob, double tau, int max_iters,
                      const Eigen::VectorXd& x0, bool force_unit_momentum) {
  if (tau < 0.0) throw std::invalid_argument("fista: tau must be >= 0");
  const double s = ista_scale(prob);  // >= 1 by construction
  const double s2 = s * s;
  const double tau_s = tau / s2;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd y = x0;
  double t = 1.0;
  for (int k = 0; k < max_iters; ++k) {
    Eigen::VectorXd xn = soft_threshold(y + (prob.atb - prob.gram * y) / s2, tau_s);
    if (!xn.allFinite()) {
      throw std::runtime_error("fista: iterate became non-finite at iteration " +
                               std::to_string(k));
    }
    double tn = force_unit_momentum ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = xn + ((t - 1.0) / tn) * (xn - x);
    x = std::move(xn);
    t = tn;
  }
  return x;
}

}  // namespace erfmin
