#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "erfmin/objectives.hpp"
#include "erfmin/rng.hpp"

using erfmin::HessianOperator;
using erfmin::ObjectiveSpec;
using erfmin::ProblemData;
using erfmin::SmoothingKind;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kC = std::sqrt(2.0 / kPi);

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

ProblemData random_problem(int m, int n, std::uint64_t seed) {
  return ProblemData(random_matrix(m, n, seed), random_vector(m, seed + 1));
}

// Dense reconstruction of the Hessian operator by applying it to basis
// vectors.
Eigen::MatrixXd densify(const HessianOperator& H, int n) {
  Eigen::MatrixXd M(n, n);
  for (int j = 0; j < n; ++j) {
    M.col(j) = H.apply(Eigen::VectorXd::Unit(n, j));
  }
  return M;
}

}  // namespace

TEST_CASE("f_p_value: hand-computed examples") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
  ProblemData prob(A, b);

  Eigen::VectorXd x(2);
  x << 3.0, -4.0;
  // ||x||^2 + 2 tau ||x||_1 = 25 + 2*0.5*7 = 32
  CHECK(erfmin::f_p_value(prob, x, 1.0, 0.5) == doctest::Approx(32.0).epsilon(1e-15));

  Eigen::VectorXd y(2);
  y << 1.0, 1.0;
  // p = 0.5: reg = (1^0.5 + 1^0.5)^2 = 4; 2 + 2*0.75*4 = 8
  CHECK(erfmin::f_p_value(prob, y, 0.5, 0.75) == doctest::Approx(8.0).epsilon(1e-15));

  CHECK(erfmin::f_p_value(prob, Eigen::VectorXd::Zero(2), 0.5, 1.0) == 0.0);
  CHECK_THROWS_AS(erfmin::f_p_value(prob, x, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(erfmin::f_p_value(prob, Eigen::VectorXd::Zero(3), 1.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("g_p_sigma: closed forms at zero and p=1 additivity") {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
  const double sigma = 0.2;
  // each phi(0) = sqrt(2/pi) sigma; p=1 sums them
  CHECK(erfmin::g_p_sigma(z, 1.0, sigma) == doctest::Approx(3.0 * kC * sigma).epsilon(1e-15));
  // p < 1: (3 c^p)^{1/p} = c * 3^{1/p}
  CHECK(erfmin::g_p_sigma(z, 0.5, sigma) ==
        doctest::Approx(kC * sigma * 9.0).epsilon(1e-14));
  CHECK_THROWS_AS(erfmin::g_p_sigma(z, 0.0, sigma), std::invalid_argument);
}

TEST_CASE("h_value at x = 0 for each kind") {
  auto A = random_matrix(6, 4, 11);
  auto b = random_vector(6, 12);
  ProblemData prob(A, b);
  const double tau = 0.7, sigma = 0.3;
  const double fid = b.squaredNorm();
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);

  auto h_at_zero = [&](SmoothingKind kind) {
    return erfmin::h_value(prob, ObjectiveSpec{1.0, tau, sigma, kind}, zero);
  };
  CHECK(h_at_zero(SmoothingKind::ConvPhi) ==
        doctest::Approx(fid + 2.0 * tau * 4.0 * kC * sigma).epsilon(1e-14));
  CHECK(h_at_zero(SmoothingKind::ConvPhiShifted) == doctest::Approx(fid).epsilon(1e-14));
  CHECK(h_at_zero(SmoothingKind::ConvPhiHat) == doctest::Approx(fid).epsilon(1e-14));
  CHECK(h_at_zero(SmoothingKind::SqrtEps) ==
        doctest::Approx(fid + 2.0 * tau * 4.0 * sigma).epsilon(1e-14));
  CHECK(h_at_zero(SmoothingKind::Huber) == doctest::Approx(fid).epsilon(1e-14));
}

TEST_CASE("SqrtEps surrogate stays within 2 tau n sigma of the exact objective") {
  auto prob = random_problem(8, 5, 21);
  const double tau = 0.4, sigma = 0.15;
  ObjectiveSpec spec{1.0, tau, sigma, SmoothingKind::SqrtEps};
  for (std::uint64_t s = 0; s < 5; ++s) {
    Eigen::VectorXd x = random_vector(5, 100 + s);
    double h = erfmin::h_value(prob, spec, x);
    double f = erfmin::f_p_value(prob, x, 1.0, tau);
    CHECK(h >= f);
    CHECK(h - f <= 2.0 * tau * 5.0 * sigma * (1.0 + 1e-14));
  }
}

TEST_CASE("gradient at the origin is -2 A^T b for every kind") {
  auto prob = random_problem(7, 5, 31);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
  Eigen::VectorXd expect = -2.0 * prob.atb;
  for (auto kind : {SmoothingKind::ConvPhi, SmoothingKind::ConvPhiShifted,
                    SmoothingKind::ConvPhiHat, SmoothingKind::ConvPhiGaussShift,
                    SmoothingKind::SqrtEps, SmoothingKind::Huber}) {
    Eigen::VectorXd g =
        erfmin::h_gradient(prob, ObjectiveSpec{1.0, 0.9, 0.2, kind}, zero);
    CHECK((g - expect).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("ConvPhi and ConvPhiShifted have identical gradients") {
  auto prob = random_problem(9, 6, 41);
  Eigen::VectorXd x = random_vector(6, 43);
  Eigen::VectorXd g1 =
      erfmin::h_gradient(prob, ObjectiveSpec{1.0, 0.6, 0.25, SmoothingKind::ConvPhi}, x);
  Eigen::VectorXd g2 = erfmin::h_gradient(
      prob, ObjectiveSpec{1.0, 0.6, 0.25, SmoothingKind::ConvPhiShifted}, x);
  CHECK((g1 - g2).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("finite differences confirm the gradient (all kinds, p = 1 and p < 1)") {
  struct Case {
    SmoothingKind kind;
    double p;
  };
  const std::vector<Case> cases = {
      {SmoothingKind::ConvPhi, 1.0},   {SmoothingKind::ConvPhiShifted, 1.0},
      {SmoothingKind::ConvPhiHat, 1.0}, {SmoothingKind::ConvPhiGaussShift, 1.0},
      {SmoothingKind::SqrtEps, 1.0},   {SmoothingKind::ConvPhi, 0.83},
      {SmoothingKind::ConvPhi, 0.5}};
  for (const auto& c : cases) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto prob = random_problem(10, 7, 500 + seed);
      Eigen::VectorXd x = random_vector(7, 600 + seed);
      ObjectiveSpec spec{c.p, 0.35, 0.3, c.kind};
      Eigen::VectorXd g = erfmin::h_gradient(prob, spec, x);
      Eigen::VectorXd fd(7);
      for (int k = 0; k < 7; ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
        Eigen::VectorXd xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        fd[k] = (erfmin::h_value(prob, spec, xp) - erfmin::h_value(prob, spec, xm)) / (2.0 * h);
      }
      double rel = (fd - g).norm() / std::max(1.0, g.norm());
      CHECK(rel < 1e-5);
    }
  }
}

TEST_CASE("finite differences confirm the Hessian apply") {
  struct Case {
    SmoothingKind kind;
    double p;
  };
  const std::vector<Case> cases = {{SmoothingKind::ConvPhi, 1.0},
                                   {SmoothingKind::ConvPhiShifted, 1.0},
                                   {SmoothingKind::ConvPhiHat, 1.0},
                                   {SmoothingKind::SqrtEps, 1.0},
                                   {SmoothingKind::ConvPhi, 0.83},
                                   {SmoothingKind::ConvPhi, 0.5}};
  for (const auto& c : cases) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto prob = random_problem(10, 7, 700 + seed);
      Eigen::VectorXd x = random_vector(7, 800 + seed);
      Eigen::VectorXd w = random_vector(7, 900 + seed).normalized();
      ObjectiveSpec spec{c.p, 0.35, 0.3, c.kind};
      HessianOperator H = erfmin::h_hessian(prob, spec, x);
      Eigen::VectorXd Hw = H.apply(w);
      const double h = 1e-6;
      Eigen::VectorXd fd =
          (erfmin::h_gradient(prob, spec, x + h * w) - erfmin::h_gradient(prob, spec, x - h * w)) /
          (2.0 * h);
      double rel = (fd - Hw).norm() / std::max(1.0, Hw.norm());
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("Hessian operator is symmetric") {
  auto prob = random_problem(10, 6, 1001);
  Eigen::VectorXd x = random_vector(6, 1002);
  for (double p : {1.0, 0.7}) {
    ObjectiveSpec spec{p, 0.5, 0.2, SmoothingKind::ConvPhi};
    HessianOperator H = erfmin::h_hessian(prob, spec, x);
    for (std::uint64_t s = 0; s < 4; ++s) {
      Eigen::VectorXd u = random_vector(6, 1100 + s);
      Eigen::VectorXd v = random_vector(6, 1200 + s);
      double uv = u.dot(H.apply(v));
      double vu = v.dot(H.apply(u));
      CHECK(uv == doctest::Approx(vu).epsilon(1e-12));
    }
  }
}

TEST_CASE("p=1 ConvPhi Hessian diagonal at the origin is 2 tau sqrt(2/pi)/sigma") {
  auto prob = random_problem(5, 3, 1301);
  const double tau = 0.8, sigma = 0.25;
  ObjectiveSpec spec{1.0, tau, sigma, SmoothingKind::ConvPhi};
  HessianOperator H = erfmin::h_hessian(prob, spec, Eigen::VectorXd::Zero(3));
  const double expect = 2.0 * tau * kC / sigma;  // 2 tau * sqrt(2/pi)/sigma
  for (int k = 0; k < 3; ++k) CHECK(H.diag[k] == doctest::Approx(expect).epsilon(1e-14));
  CHECK(!H.rank1_vec.has_value());
}

TEST_CASE("convex p=1 ConvPhi Hessian is positive definite on a generic instance") {
  auto prob = random_problem(30, 30, 1401);
  Eigen::VectorXd x = 0.5 * random_vector(30, 1402);
  ObjectiveSpec spec{1.0, 0.4, 0.5, SmoothingKind::ConvPhi};
  Eigen::MatrixXd M = densify(erfmin::h_hessian(prob, spec, x), 30);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("ConvPhiHat Hessian can be indefinite") {
  // tiny data term, points well outside sigma: the Hat curvature is negative
  Eigen::MatrixXd A = 0.01 * Eigen::MatrixXd::Identity(2, 2);
  ProblemData prob(A, Eigen::VectorXd::Zero(2));
  Eigen::VectorXd x(2);
  x << 0.5, 0.5;
  ObjectiveSpec spec{1.0, 1.0, 0.1, SmoothingKind::ConvPhiHat};
  Eigen::MatrixXd M = densify(erfmin::h_hessian(prob, spec, x), 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  CHECK(es.eigenvalues().minCoeff() < 0.0);
}

TEST_CASE("surrogate value converges monotonically to F1 as sigma shrinks") {
  auto prob = random_problem(9, 6, 1501);
  // mixed magnitudes; the exact zero keeps the gap strictly positive at every
  // sigma, so the decrease is strict rather than saturating at zero
  Eigen::VectorXd x(6);
  x << 0.0, 0.02, -0.05, 0.1, -0.3, 1.0;
  const double tau = 0.45;
  double f1 = erfmin::f_p_value(prob, x, 1.0, tau);
  double prev_err = std::numeric_limits<double>::infinity();
  for (double sigma : {0.1, 0.05, 0.025, 0.0125, 1e-4}) {
    double h = erfmin::h_value(prob, ObjectiveSpec{1.0, tau, sigma, SmoothingKind::ConvPhi}, x);
    double err = h - f1;  // ConvPhi dominates |t|, so the gap is positive
    CHECK(err > 0.0);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err <= 2.0 * tau * 6.0 * kC * 1e-4 * (1.0 + 1e-12));
}

TEST_CASE("invalid specs and dimensions are rejected") {
  auto prob = random_problem(6, 4, 1601);
  Eigen::VectorXd x = random_vector(4, 1602);
  CHECK_THROWS_AS(
      erfmin::h_value(prob, ObjectiveSpec{0.0, 0.5, 0.1, SmoothingKind::ConvPhi}, x),
      std::invalid_argument);
  CHECK_THROWS_AS(
      erfmin::h_value(prob, ObjectiveSpec{1.5, 0.5, 0.1, SmoothingKind::ConvPhi}, x),
      std::invalid_argument);
  CHECK_THROWS_AS(
      erfmin::h_value(prob, ObjectiveSpec{0.8, 0.5, 0.1, SmoothingKind::SqrtEps}, x),
      std::invalid_argument);  // p < 1 needs ConvPhi
  CHECK_THROWS_AS(
      erfmin::h_value(prob, ObjectiveSpec{1.0, -0.5, 0.1, SmoothingKind::ConvPhi}, x),
      std::invalid_argument);
  CHECK_THROWS_AS(
      erfmin::h_gradient(prob, ObjectiveSpec{1.0, 0.5, 0.1, SmoothingKind::ConvPhi},
                         Eigen::VectorXd::Zero(9)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      erfmin::h_hessian(prob, ObjectiveSpec{1.0, 0.5, 0.1, SmoothingKind::Huber}, x),
      std::invalid_argument);  // Huber has no second derivative
}

TEST_CASE("ProblemData validates its inputs and caches the Gram pieces") {
  Eigen::MatrixXd A = random_matrix(4, 3, 1701);
  Eigen::VectorXd b = random_vector(4, 1702);
  ProblemData prob(A, b);
  CHECK((prob.gram - A.transpose() * A).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((prob.atb - A.transpose() * b).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(prob.m() == 4);
  CHECK(prob.n() == 3);

  CHECK_THROWS_AS(ProblemData(A, Eigen::VectorXd::Zero(5)), std::invalid_argument);
  Eigen::MatrixXd bad = A;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ProblemData(bad, b), std::invalid_argument);
  Eigen::VectorXd truth_bad = Eigen::VectorXd::Zero(7);
  CHECK_THROWS_AS(ProblemData(A, b, truth_bad), std::invalid_argument);
}
