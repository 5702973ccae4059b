#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "erfmin/line_search.hpp"
#include "erfmin/objectives.hpp"
#include "erfmin/rng.hpp"

using erfmin::LineSearchConfig;
using erfmin::ObjectiveSpec;
using erfmin::ProblemData;
using erfmin::SmoothingKind;

namespace {

Eigen::MatrixXd random_matrix(int m, int n, std::uint64_t seed) {
  erfmin::Rng rng(seed);
  Eigen::MatrixXd A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  return A;
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  erfmin::Rng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// Quadratic test harness: h(x) = ||Ax-b||^2 via the tau = 0 surrogate, whose
// gradient and Hessian are exact regardless of the smoothing kind.
struct Quadratic {
  ProblemData prob;
  ObjectiveSpec spec{1.0, 0.0, 0.1, SmoothingKind::ConvPhi};

  Quadratic(int m, int n, std::uint64_t seed)
      : prob(random_matrix(m, n, seed), random_vector(m, seed + 7)) {}

  double value(const Eigen::VectorXd& x) const { return erfmin::h_value(prob, spec, x); }
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const {
    return erfmin::h_gradient(prob, spec, x);
  }
  erfmin::HessianOperator hess(const Eigen::VectorXd& x) const {
    return erfmin::h_hessian(prob, spec, x);
  }
  // analytic exact minimizer of mu -> h(x + mu s)
  double exact_step(const Eigen::VectorXd& x, const Eigen::VectorXd& s) const {
    double num = -grad(x).dot(s);
    double den = 2.0 * s.dot(prob.gram * s);
    return num / den;
  }
};

}  // namespace

TEST_CASE("backtracking: hand-checked shrink on f(x) = x^2") {
  auto value_fn = [](const Eigen::VectorXd& v) { return v[0] * v[0]; };
  Eigen::VectorXd x(1), s(1), g(1);
  x << 1.0;
  s << -3.0;
  g << 2.0;
  LineSearchConfig cfg;  // mu0 = 1, rho = 0.5, c = 1e-4
  bool accepted = false;
  double mu = erfmin::backtracking(value_fn, g, x, s, cfg, &accepted);
  // mu = 1 probes f(-2) = 4 (reject), mu = 0.5 probes f(-0.5) = 0.25 (accept)
  CHECK(mu == 0.5);
  CHECK(accepted);

  s << -1.0;
  mu = erfmin::backtracking(value_fn, g, x, s, cfg, &accepted);
  CHECK(mu == 1.0);  // f(0) = 0 passes at the initial step
  CHECK(accepted);
}

TEST_CASE("backtracking: flat slope accepts the initial step") {
  auto value_fn = [](const Eigen::VectorXd&) { return 5.0; };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
  bool accepted = false;
  double mu = erfmin::backtracking(value_fn, g, x, s, LineSearchConfig{}, &accepted);
  CHECK(mu == 1.0);
  CHECK(accepted);
}

TEST_CASE("backtracking: ascent direction exhausts the budget") {
  auto value_fn = [](const Eigen::VectorXd& v) { return v[0] * v[0]; };
  Eigen::VectorXd x(1), s(1), g(1);
  x << 1.0;
  s << 1.0;  // uphill
  g << 2.0;
  bool accepted = true;
  // Budget small enough that mu stays above the rounding floor where
  // x + mu*s == x would make the probe succeed vacuously.
  LineSearchConfig cfg;
  cfg.max_shrinks = 20;
  double mu = erfmin::backtracking(value_fn, g, x, s, cfg, &accepted);
  CHECK(!accepted);
  CHECK(mu == std::ldexp(1.0, -cfg.max_shrinks));  // mu0 * rho^20 exactly

  // With the default deep budget the same ascent direction is eventually
  // "accepted" at a step so small the iterate no longer moves.
  accepted = false;
  mu = erfmin::backtracking(value_fn, g, x, s, LineSearchConfig{}, &accepted);
  CHECK(accepted);
  CHECK(x[0] + mu * s[0] == x[0]);
}

TEST_CASE("backtracking: non-finite probe values throw") {
  Eigen::VectorXd x(1), s(1), g(1);
  x << 1.0;
  s << -1.0;
  g << 2.0;
  auto nan_probe = [](const Eigen::VectorXd& v) {
    return v[0] == 1.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(erfmin::backtracking(nan_probe, g, x, s, LineSearchConfig{}),
                  std::runtime_error);
  auto nan_start = [](const Eigen::VectorXd&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(erfmin::backtracking(nan_start, g, x, s, LineSearchConfig{}),
                  std::runtime_error);
}

TEST_CASE("taylor step: exact one-step minimizer on quadratics") {
  // identity data: steepest descent step on ||x - b||^2 is exactly 1/2
  ProblemData prob(Eigen::MatrixXd::Identity(4, 4), random_vector(4, 55));
  ObjectiveSpec spec{1.0, 0.0, 0.1, SmoothingKind::ConvPhi};
  Eigen::VectorXd x = random_vector(4, 56);
  Eigen::VectorXd g = erfmin::h_gradient(prob, spec, x);
  double mu = erfmin::taylor_hessian_step(g, erfmin::h_hessian(prob, spec, x), -g);
  CHECK(mu == 0.5);

  // general quadratic: matches the analytic formula and the directional
  // derivative vanishes at the accepted point
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Quadratic q(9, 5, 1000 + seed);
    Eigen::VectorXd y = random_vector(5, 2000 + seed);
    Eigen::VectorXd gy = q.grad(y);
    Eigen::VectorXd s = -gy;
    double step = erfmin::taylor_hessian_step(gy, q.hess(y), s);
    CHECK(step == doctest::Approx(q.exact_step(y, s)).epsilon(1e-14));
    double slope_at_min = q.grad(y + step * s).dot(s);
    CHECK(std::abs(slope_at_min) <= 1e-9 * std::max(1.0, std::abs(gy.dot(s))));
  }
}

TEST_CASE("taylor step: orthogonal direction gives a zero step") {
  Quadratic q(6, 3, 77);
  Eigen::VectorXd x = random_vector(3, 78);
  Eigen::VectorXd g = q.grad(x);
  // build s orthogonal to g
  Eigen::VectorXd s = random_vector(3, 79);
  s -= (s.dot(g) / g.squaredNorm()) * g;
  double mu = erfmin::taylor_hessian_step(g, q.hess(x), s);
  CHECK(std::abs(mu) <= 1e-12);
}

TEST_CASE("taylor step: negative curvature yields a non-positive step") {
  // tiny data term + ConvPhiHat outside its well: curvature along -g is negative
  Eigen::MatrixXd A = 0.01 * Eigen::MatrixXd::Identity(2, 2);
  ProblemData prob(A, Eigen::VectorXd::Zero(2));
  ObjectiveSpec spec{1.0, 1.0, 0.1, SmoothingKind::ConvPhiHat};
  Eigen::VectorXd x(2);
  x << 0.5, 0.5;
  Eigen::VectorXd g = erfmin::h_gradient(prob, spec, x);
  double mu = erfmin::taylor_hessian_step(g, erfmin::h_hessian(prob, spec, x), -g);
  CHECK(mu < 0.0);
}

TEST_CASE("taylor step: degenerate curvature throws") {
  Quadratic q(5, 3, 91);
  Eigen::VectorXd x = random_vector(3, 92);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(erfmin::taylor_hessian_step(q.grad(x), q.hess(x), zero),
                  std::runtime_error);
}

TEST_CASE("secant step: equals the taylor step on quadratics for any probe width") {
  for (double xi : {1e-3, 0.1, 1.0}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Quadratic q(8, 5, 3000 + seed);
      Eigen::VectorXd x = random_vector(5, 4000 + seed);
      Eigen::VectorXd g = q.grad(x);
      Eigen::VectorXd s = -g;
      auto grad_fn = [&](const Eigen::VectorXd& y) { return q.grad(y); };
      double taylor = erfmin::taylor_hessian_step(g, q.hess(x), s);
      double secant = erfmin::secant_fd_step(grad_fn, x, s, xi);
      CHECK(secant == doctest::Approx(taylor).epsilon(1e-12));
    }
  }
}

TEST_CASE("secant step: argument validation") {
  Quadratic q(5, 3, 95);
  Eigen::VectorXd x = random_vector(3, 96);
  Eigen::VectorXd s = -q.grad(x);
  auto grad_fn = [&](const Eigen::VectorXd& y) { return q.grad(y); };
  CHECK_THROWS_AS(erfmin::secant_fd_step(grad_fn, x, s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(erfmin::secant_fd_step(grad_fn, x, s, -0.1), std::invalid_argument);
  // constant gradient field: the secant denominator degenerates
  auto const_grad = [&](const Eigen::VectorXd&) { return s; };
  CHECK_THROWS_AS(erfmin::secant_fd_step(const_grad, x, s, 0.1), std::runtime_error);
}

TEST_CASE("all three methods never increase a convex quadratic along -grad") {
  int trials = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Quadratic q(10, 6, 5000 + seed);
    Eigen::VectorXd x = random_vector(6, 6000 + seed);
    double f0 = q.value(x);
    Eigen::VectorXd g = q.grad(x);
    Eigen::VectorXd s = -g;
    auto value_fn = [&](const Eigen::VectorXd& y) { return q.value(y); };
    auto grad_fn = [&](const Eigen::VectorXd& y) { return q.grad(y); };

    bool accepted = false;
    double mu_bt = erfmin::backtracking(value_fn, g, x, s, LineSearchConfig{}, &accepted);
    CHECK(accepted);
    CHECK(mu_bt > 0.0);
    CHECK(mu_bt <= 1.0);
    CHECK(q.value(x + mu_bt * s) <= f0 * (1.0 + 1e-12));

    double mu_ty = erfmin::taylor_hessian_step(g, q.hess(x), s);
    CHECK(mu_ty > 0.0);
    CHECK(q.value(x + mu_ty * s) <= f0 * (1.0 + 1e-12));

    double mu_se = erfmin::secant_fd_step(grad_fn, x, s, 0.01);
    CHECK(mu_se > 0.0);
    CHECK(q.value(x + mu_se * s) <= f0 * (1.0 + 1e-12));
    ++trials;
  }
  CHECK(trials == 100);
}
