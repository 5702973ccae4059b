#pragma once

#include <Eigen/Dense>
#include <functional>

#include "erfmin/objectives.hpp"

namespace erfmin {

enum class LineSearchMethod { Backtracking, TaylorHessian, SecantFD };

struct LineSearchConfig {
  LineSearchMethod method = LineSearchMethod::Backtracking;
  double mu0 = 1.0;       // initial step for backtracking
  double rho = 0.5;       // shrink factor in (0,1)
  double c = 1e-4;        // Armijo sufficient-decrease constant in (0,1)
  double xi_scale = 1e-3; // finite-difference probe scale for SecantFD
  int max_shrinks = 60;
};

using ValueFn = std::function<double(const Eigen::VectorXd&)>;
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Armijo backtracking from mu0, shrinking by rho.  Returns the accepted mu;
// when max_shrinks probes all fail the sufficient-decrease test, returns the
// last mu tried and sets *accepted = false.  Non-finite probe values throw.
double backtracking(const ValueFn& value_fn, const Eigen::VectorXd& grad,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& s,
                    const LineSearchConfig& cfg, bool* accepted = nullptr);

// Second-order model step mu = -grad.s / (s.H s).  Exact on quadratics.
// Throws on |s.H s| < 1e-300 (degenerate curvature); may return mu <= 0 on
// negative curvature — callers must detect and fall back.
double taylor_hessian_step(const Eigen::VectorXd& grad, const HessianOperator& hess,
                           const Eigen::VectorXd& s);

// Gradient-secant step mu = -2 xi grad(x).s / ((grad(x+xi s) - grad(x-xi s)).s).
// Exact on quadratics for any xi > 0; throws on a degenerate denominator.
double secant_fd_step(const GradFn& grad_fn, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& s, double xi);

}  // namespace erfmin
