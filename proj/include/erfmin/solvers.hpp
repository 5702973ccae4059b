#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "erfmin/line_search.hpp"
#include "erfmin/objectives.hpp"

namespace erfmin {

// Per-iteration sparsification rule applied after the line-search step.
//  Soft        shrink toward zero (level compensated for the smoothing width;
//              see solvers.cpp for the exact rule)
//  Hard        zero out everything with |x_k| <= tau
//  Optimality  zero components whose correlation |A^T(b-Ax)|_k is <= tau
enum class ThresholdRule { Soft, Hard, Optimality };

struct SolverConfig {
  double tau = 0.1;   // regularization weight (> 0 for meaningful runs)
  double p = 1.0;     // exponent in (0, 1]
  double sigma0 = 0.0;  // initial smoothing width; 0 = auto: 0.1*max(1, |x0|_inf)
  double alpha = 0.8;   // annealing factor in (0, 1)
  int max_iters = 50;
  SmoothingKind kind = SmoothingKind::ConvPhi;
  LineSearchConfig line_search{};
  ThresholdRule threshold = ThresholdRule::Soft;
  int newton_inner_iters = 15;
  double newton_tol = 1e-10;  // inner-CG relative residual target
  double stop_tol = 0.0;      // 0 = run the full iteration budget
  // Sub-resolution cleanup: after thresholding, zero every component with
  // |x_k| <= debris_kappa * sigma_n (such components are below the surrogate's
  // resolution at the current smoothing width).  0 disables the cleanup.
  double debris_kappa = 0.0;
  // Diagnostic switch: force the Polak-Ribiere beta clamp so that nonlinear_cg
  // reproduces steepest_descent exactly.
  bool force_beta_zero = false;
};

struct IterateRecord {
  int iteration = 0;
  double sigma = 0.0;
  double h_value = 0.0;
  double f1_value = 0.0;
  double residual_norm = 0.0;
  double mu = 0.0;
  Eigen::Index nnz = 0;
  double beta = 0.0;
  bool beta_clamped = false;
  bool ls_fallback = false;
};
using IterateTrace = std::vector<IterateRecord>;

struct SolveResult {
  Eigen::VectorXd x;
  IterateTrace trace;
};

// Thrown when an iterate or objective becomes non-finite; carries the trace
// accumulated up to the failure.
class NumericalDivergence : public std::runtime_error {
public:
  NumericalDivergence(const std::string& msg, IterateTrace partial_trace)
      : std::runtime_error(msg), partial(std::move(partial_trace)) {}
  IterateTrace partial;
};

// Componentwise soft threshold: sign(x_k) * max(|x_k| - tau, 0).
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double tau);

// Componentwise hard threshold: x_k if |x_k| > tau else 0 (boundary zeroed).
Eigen::VectorXd hard_threshold(const Eigen::VectorXd& x, double tau);

// Zero the components k where |A^T(b - Ax)|_k <= tau; leave others unchanged.
Eigen::VectorXd optimality_threshold(const ProblemData& prob, const Eigen::VectorXd& x,
                                     double tau);

// max{ g_new.(g_new - g_old) / (g_old.g_old), 0 }.  Throws when g_old is
// numerically zero (caller restarts with steepest descent).
double polak_ribiere_beta(const Eigen::VectorXd& g_new, const Eigen::VectorXd& g_old);

// Annealed smooth-surrogate solvers with per-iteration thresholding.
SolveResult steepest_descent(const ProblemData& prob, const SolverConfig& cfg,
                             const Eigen::VectorXd& x0);
SolveResult nonlinear_cg(const ProblemData& prob, const SolverConfig& cfg,
                         const Eigen::VectorXd& x0);
SolveResult newton(const ProblemData& prob, const SolverConfig& cfg,
                   const Eigen::VectorXd& x0);

// Proximal-gradient baselines on the exact F1 objective.  The operator is
// rescaled internally so the implicit unit step is valid.
Eigen::VectorXd ista(const ProblemData& prob, double tau, int max_iters,
                     const Eigen::VectorXd& x0);
Eigen::VectorXd fista(const ProblemData& prob, double tau, int max_iters,
                      const Eigen::VectorXd& x0, bool force_unit_momentum = false);

}  // namespace erfmin
