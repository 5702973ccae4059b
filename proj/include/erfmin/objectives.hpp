#pragma once

#include <Eigen/Dense>
#include <optional>

#include "erfmin/scalar_kernels.hpp"

namespace erfmin {

// Dense least-squares problem data with cached Gram pieces.  Immutable after
// construction; the cached gram/atb are computed once and shared by the
// objective evaluations, line searches, and solvers.
struct ProblemData {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd gram;  // A^T A
  Eigen::VectorXd atb;   // A^T b
  std::optional<Eigen::VectorXd> truth;

  ProblemData() = default;
  ProblemData(Eigen::MatrixXd A_in, Eigen::VectorXd b_in,
              std::optional<Eigen::VectorXd> truth_in = std::nullopt);

  Eigen::Index m() const { return A.rows(); }
  Eigen::Index n() const { return A.cols(); }
};

// Which smooth surrogate to evaluate: exponent p in (0,1], regularization
// weight tau > 0, smoothing width sigma, and the pointwise kind.
// p < 1 requires kind == ConvPhi (the only kind bounded away from zero, so
// the phi^{p-1} powers stay finite).
struct ObjectiveSpec {
  double p = 1.0;
  double tau = 0.0;
  double sigma = 0.1;
  SmoothingKind kind = SmoothingKind::ConvPhi;
};

// Structured Hessian 2 A^T A + Diag(diag) + rank1_weight * v v^T applied
// matrix-free against the cached Gram matrix.
struct HessianOperator {
  const Eigen::MatrixXd* gram_ref = nullptr;
  Eigen::VectorXd diag;
  std::optional<Eigen::VectorXd> rank1_vec;
  double rank1_weight = 0.0;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

// Exact non-smooth objective ||Ax-b||^2 + 2*tau*(sum |x_k|^p)^{1/p}.
double f_p_value(const ProblemData& prob, const Eigen::VectorXd& x, double p, double tau);

// Smooth surrogate value ||Ax-b||^2 + 2*tau*R(x), where R is the sum of the
// pointwise approximation for p = 1 and the g_p_sigma composite for p < 1.
double h_value(const ProblemData& prob, const ObjectiveSpec& spec, const Eigen::VectorXd& x);

// Gradient of h_value.
Eigen::VectorXd h_gradient(const ProblemData& prob, const ObjectiveSpec& spec,
                           const Eigen::VectorXd& x);

// Structured Hessian of h_value.  Unsupported for Huber (no second
// derivative).
HessianOperator h_hessian(const ProblemData& prob, const ObjectiveSpec& spec,
                          const Eigen::VectorXd& x);

// (sum_k phi_sigma(x_k)^p)^{1/p} with the ConvPhi kind; overflow/underflow
// guarded by factoring out the largest term.
double g_p_sigma(const Eigen::VectorXd& x, double p, double sigma);

}  // namespace erfmin
