#include "erfmin/line_search.hpp"

#include <cmath>
#include <stdexcept>

namespace erfmin {

double backtracking(const ValueFn& value_fn, const Eigen::VectorXd& grad,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& s,
                    const LineSearchConfig& cfg, bool* accepted) {
  const double f0 = value_fn(x);
  const double gs = grad.dot(s);
  if (!std::isfinite(f0)) {
    throw std::runtime_error("backtracking: non-finite objective at the current point");
  }
  double mu = cfg.mu0;
  for (int i = 0; i <= cfg.max_shrinks; ++i) {
    double f = value_fn(x + mu * s);
    if (!std::isfinite(f)) {
      throw std::runtime_error("backtracking: non-finite objective at a probe point");
    }
    if (f <= f0 + cfg.c * mu * gs) {
      if (accepted) *accepted = true;
      return mu;
    }
    if (i < cfg.max_shrinks) mu *= cfg.rho;
  }
  if (accepted) *accepted = false;
  return mu;
}

double taylor_hessian_step(const Eigen::VectorXd& grad, const HessianOperator& hess,
                           const Eigen::VectorXd& s) {
  double den = s.dot(hess.apply(s));
  if (std::abs(den) < 1e-300) {
    throw std::runtime_error("taylor_hessian_step: degenerate curvature along s");
  }
  return -grad.dot(s) / den;
}

double secant_fd_step(const GradFn& grad_fn, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& s, double xi) {
  if (!(xi > 0.0)) {
    throw std::invalid_argument("secant_fd_step: xi must be positive");
  }
  double d0 = grad_fn(x).dot(s);
  double dp = grad_fn(x + xi * s).dot(s);
  double dm = grad_fn(x - xi * s).dot(s);
  double den = dp - dm;
  if (std::abs(den) < 1e-300) {
    throw std::runtime_error("secant_fd_step: degenerate curvature along s");
  }
  return -2.0 * xi * d0 / den;
}

}  // namespace erfmin
