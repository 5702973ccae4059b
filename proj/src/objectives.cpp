#include "erfmin/objectives.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace erfmin {

namespace {

constexpr double kPhiFloor = 1e-300;  // guards phi^{p-1} powers against underflow

void check_spec(const ObjectiveSpec& spec, const char* who) {
  if (!(spec.p > 0.0) || spec.p > 1.0) {
    throw std::invalid_argument(std::string(who) + ": p must lie in (0, 1]");
  }
  if (spec.p < 1.0 && spec.kind != SmoothingKind::ConvPhi) {
    throw std::invalid_argument(std::string(who) +
                                ": p < 1 is supported only with the ConvPhi kind");
  }
  if (!(spec.tau >= 0.0)) {
    throw std::invalid_argument(std::string(who) + ": tau must be non-negative");
  }
}

void check_dims(const ProblemData& prob, const Eigen::VectorXd& x, const char* who) {
  if (x.size() != prob.n()) {
    throw std::invalid_argument(std::string(who) + ": x has wrong dimension");
  }
}

}  // namespace

ProblemData::ProblemData(Eigen::MatrixXd A_in, Eigen::VectorXd b_in,
                         std::optional<Eigen::VectorXd> truth_in)
    : A(std::move(A_in)), b(std::move(b_in)), truth(std::move(truth_in)) {
  if (A.rows() < 1 || A.cols() < 1) {
    throw std::invalid_argument("ProblemData: need at least a 1x1 matrix");
  }
  if (b.size() != A.rows()) {
    throw std::invalid_argument("ProblemData: b dimension mismatch");
  }
  if (!A.allFinite() || !b.allFinite()) {
    throw std::invalid_argument("ProblemData: entries must be finite");
  }
  if (truth && truth->size() != A.cols()) {
    throw std::invalid_argument("ProblemData: truth dimension mismatch");
  }
  gram.noalias() = A.transpose() * A;
  atb.noalias() = A.transpose() * b;
}

Eigen::VectorXd HessianOperator::apply(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = 2.0 * (*gram_ref * v);
  out.array() += diag.array() * v.array();
  if (rank1_vec) {
    out.noalias() += rank1_weight * rank1_vec->dot(v) * (*rank1_vec);
  }
  return out;
}

double f_p_value(const ProblemData& prob, const Eigen::VectorXd& x, double p, double tau) {
  if (!(p > 0.0)) {
    throw std::invalid_argument("f_p_value: p must be positive");
  }
  check_dims(prob, x, "f_p_value");
  double fid = (prob.A * x - prob.b).squaredNorm();
  double reg;
  if (p == 1.0) {
    reg = x.lpNorm<1>();
  } else {
    double amax = x.cwiseAbs().maxCoeff();
    if (amax == 0.0) {
      reg = 0.0;
    } else {
      double s = 0.0;
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        s += std::pow(std::abs(x[k]) / amax, p);
      }
      reg = amax * std::pow(s, 1.0 / p);
    }
  }
  return fid + 2.0 * tau * reg;
}

double g_p_sigma(const Eigen::VectorXd& x, double p, double sigma) {
  if (!(p > 0.0)) {
    throw std::invalid_argument("g_p_sigma: p must be positive");
  }
  Eigen::VectorXd phi(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    phi[k] = smooth_abs(SmoothingKind::ConvPhi, x[k], sigma).value;
  }
  if (p == 1.0) {
    return phi.sum();
  }
  double pmax = phi.maxCoeff();  // phi > 0 always
  double s = 0.0;
  for (Eigen::Index k = 0; k < phi.size(); ++k) {
    s += std::pow(phi[k] / pmax, p);
  }
  return pmax * std::pow(s, 1.0 / p);
}

double h_value(const ProblemData& prob, const ObjectiveSpec& spec, const Eigen::VectorXd& x) {
  check_spec(spec, "h_value");
  check_dims(prob, x, "h_value");
  double fid = (prob.A * x - prob.b).squaredNorm();
  double reg;
  if (spec.p == 1.0) {
    reg = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      reg += smooth_abs(spec.kind, x[k], spec.sigma).value;
    }
  } else {
    reg = g_p_sigma(x, spec.p, spec.sigma);
  }
  return fid + 2.0 * spec.tau * reg;
}

Eigen::VectorXd h_gradient(const ProblemData& prob, const ObjectiveSpec& spec,
                           const Eigen::VectorXd& x) {
  check_spec(spec, "h_gradient");
  check_dims(prob, x, "h_gradient");
  Eigen::VectorXd g = 2.0 * (prob.gram * x - prob.atb);
  if (spec.p == 1.0) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      g[k] += 2.0 * spec.tau * smooth_abs(spec.kind, x[k], spec.sigma).d1;
    }
    return g;
  }
  // p < 1, ConvPhi only: gradient of 2 tau G with G = (sum phi^p)^{1/p} is
  // 2 tau G^{1-p} phi_j^{p-1} erf(x_j/(sqrt2 sigma)).
  const double G = g_p_sigma(x, spec.p, spec.sigma);
  const double gpow = std::pow(G, 1.0 - spec.p);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    ScalarJet j = smooth_abs(SmoothingKind::ConvPhi, x[k], spec.sigma);
    double phi = std::max(j.value, kPhiFloor);
    g[k] += 2.0 * spec.tau * gpow * std::pow(phi, spec.p - 1.0) * j.d1;
  }
  return g;
}

HessianOperator h_hessian(const ProblemData& prob, const ObjectiveSpec& spec,
                          const Eigen::VectorXd& x) {
  check_spec(spec, "h_hessian");
  check_dims(prob, x, "h_hessian");
  if (spec.kind == SmoothingKind::Huber) {
    throw std::invalid_argument("h_hessian: Huber kind has no second derivative");
  }
  HessianOperator H;
  H.gram_ref = &prob.gram;
  H.diag.resize(x.size());
  if (spec.p == 1.0) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      H.diag[k] = 2.0 * spec.tau * *smooth_abs(spec.kind, x[k], spec.sigma).d2;
    }
    return H;
  }
  // p < 1: 2 A^T A + 2 tau (v v^T + Diag(w)).
  const double p = spec.p;
  const double G = g_p_sigma(x, p, spec.sigma);
  const double g1p = std::pow(G, 1.0 - p);            // G^{1-p}
  const double g12p = std::pow(G, 0.5 * (1.0 - 2.0 * p));  // G^{(1-2p)/2}
  Eigen::VectorXd v(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    ScalarJet j = smooth_abs(SmoothingKind::ConvPhi, x[k], spec.sigma);
    double phi = std::max(j.value, kPhiFloor);
    double e = j.d1;              // erf(x_k/(sqrt2 sigma))
    double ga = *j.d2;            // (sqrt2/(sigma sqrt pi)) e^{-x^2/2s^2}
    double pp1 = std::pow(phi, p - 1.0);
    double pp2 = std::pow(phi, p - 2.0);
    v[k] = std::sqrt(1.0 - p) * pp1 * e * g12p;
    H.diag[k] = 2.0 * spec.tau * g1p * ((p - 1.0) * pp2 * e * e + ga * pp1);
  }
  H.rank1_vec = std::move(v);
  H.rank1_weight = 2.0 * spec.tau;
  return H;
}

}  // namespace erfmin
