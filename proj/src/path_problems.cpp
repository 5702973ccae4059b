#include "erfmin/path_problems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "erfmin/rng.hpp"

namespace erfmin {

const char* to_string(MatrixTag tag) {
  switch (tag) {
    case MatrixTag::TypeI_GaussianDecay: return "TypeI_GaussianDecay";
    case MatrixTag::TypeII_CorrelatedCols: return "TypeII_CorrelatedCols";
    case MatrixTag::TypeIII_Cauchy: return "TypeIII_Cauchy";
  }
  return "?";
}

const char* to_string(PathSolver s) {
  switch (s) {
    case PathSolver::SD: return "SD";
    case PathSolver::CG: return "CG";
    case PathSolver::CGNewtonSandwich: return "CGNewtonSandwich";
    case PathSolver::ISTA: return "ISTA";
    case PathSolver::FISTA: return "FISTA";
  }
  return "?";
}

TauGrid tau_grid(const ProblemData& prob, int n_points, double start_div, double end_div) {
  if (n_points < 2) throw std::invalid_argument("tau_grid: need at least 2 points");
  if (!(start_div < end_div)) {
    throw std::invalid_argument("tau_grid: start_div must be < end_div");
  }
  double tmax = prob.atb.lpNorm<Eigen::Infinity>();
  if (tmax == 0.0) {
    throw std::runtime_error("tau_grid: degenerate problem, A^T b is zero");
  }
  TauGrid grid;
  grid.tau_max = tmax;
  grid.values.resize(static_cast<std::size_t>(n_points));
  const double first = tmax / start_div;
  const double last = tmax / end_div;
  const double ratio = std::pow(last / first, 1.0 / static_cast<double>(n_points - 1));
  double v = first;
  for (int i = 0; i < n_points; ++i) {
    grid.values[static_cast<std::size_t>(i)] = v;
    v *= ratio;
  }
  grid.values.front() = first;  // pin the endpoints exactly
  grid.values.back() = last;
  return grid;
}

namespace {

double sigma_after(double sigma_start, double alpha, int iters) {
  double s = sigma_start;
  for (int i = 0; i < iters; ++i) s = std::max(alpha * s, 1e-12);
  return s;
}

// One solve at a fixed tau; returns the solution and the completed iteration
// count.
std::pair<Eigen::VectorXd, int> solve_one(const ProblemData& prob, PathSolver solver,
                                          const SolverConfig& cfg, double tau,
                                          const Eigen::VectorXd& x0) {
  SolverConfig c = cfg;
  c.tau = tau;
  switch (solver) {
    case PathSolver::SD: {
      SolveResult r = steepest_descent(prob, c, x0);
      return {std::move(r.x), static_cast<int>(r.trace.size())};
    }
    case PathSolver::CG: {
      SolveResult r = nonlinear_cg(prob, c, x0);
      return {std::move(r.x), static_cast<int>(r.trace.size())};
    }
    case PathSolver::CGNewtonSandwich: {
      // Budget split 60% / 10% / 30%; the annealing schedule continues across
      // the stage boundaries so the three stages behave like one solver.
      int total = c.max_iters;
      int it_newton = std::max(1, static_cast<int>(std::lround(0.1 * total)));
      int it_cg1 = static_cast<int>(std::lround(0.6 * total));
      it_cg1 = std::clamp(it_cg1, 0, std::max(0, total - it_newton));
      int it_cg2 = std::max(0, total - it_cg1 - it_newton);
      double sigma_start = c.sigma0 > 0.0 ? c.sigma0 : 0.1 * std::max(1.0, x0.size() > 0 ? x0.lpNorm<Eigen::Infinity>() : 0.0);

      SolverConfig c1 = c;
      c1.sigma0 = sigma_start;
      c1.max_iters = it_cg1;
      SolveResult r1 = nonlinear_cg(prob, c1, x0);

      SolverConfig c2 = c;
      c2.sigma0 = sigma_after(sigma_start, c.alpha, it_cg1);
      c2.max_iters = it_newton;
      SolveResult r2 = newton(prob, c2, r1.x);

      SolverConfig c3 = c;
      c3.sigma0 = sigma_after(sigma_start, c.alpha, it_cg1 + it_newton);
      c3.max_iters = it_cg2;
      SolveResult r3 = nonlinear_cg(prob, c3, r2.x);

      int done = static_cast<int>(r1.trace.size() + r2.trace.size() + r3.trace.size());
      return {std::move(r3.x), done};
    }
    case PathSolver::ISTA:
      return {ista(prob, tau, c.max_iters, x0), c.max_iters};
    case PathSolver::FISTA:
      return {fista(prob, tau, c.max_iters, x0), c.max_iters};
  }
  throw std::logic_error("solve_one: unhandled solver");
}

}  // namespace

std::vector<PathRecord> run_path(const ProblemData& prob, PathSolver solver,
                                 const SolverConfig& cfg, const TauGrid& grid) {
  std::vector<PathRecord> records;
  records.reserve(grid.values.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(prob.n());
  for (double tau : grid.values) {
    PathRecord rec;
    rec.tau = tau;
    auto t0 = std::chrono::steady_clock::now();
    try {
      auto [sol, iters] = solve_one(prob, solver, cfg, tau, x);
      rec.solution = std::move(sol);
      rec.iterations = iters;
    } catch (const std::exception& e) {
      throw std::runtime_error("run_path: solver failed at tau=" + std::to_string(tau) + ": " +
                               e.what());
    }
    auto t1 = std::chrono::steady_clock::now();
    rec.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    rec.residual_norm = (prob.A * rec.solution - prob.b).norm();
    if (prob.truth) rec.percent_error = percent_error(rec.solution, *prob.truth);
    rec.f1_value = f_p_value(prob, rec.solution, 1.0, tau);
    x = rec.solution;
    records.push_back(std::move(rec));
  }
  return records;
}

Eigen::MatrixXd gen_matrix(const MatrixKind& kind, int m, int n, std::uint64_t seed) {
  if (m < 2 || n < 2) throw std::invalid_argument("gen_matrix: need m, n >= 2");
  Rng rng(seed);

  if (kind.tag == MatrixTag::TypeIII_Cauchy) {
    Eigen::MatrixXd A(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        double num = rng.normal();
        double den = rng.normal();
        while (den == 0.0) den = rng.normal();
        A(i, j) = num / den;
      }
    }
    return A;
  }

  if (!(kind.decay_rate > 0.0)) {
    throw std::invalid_argument("gen_matrix: decay_rate must be positive");
  }
  const int k = std::min(m, n);
  Eigen::MatrixXd G1(m, k), G2(n, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) G1(i, j) = rng.normal();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) G2(i, j) = rng.normal();
  Eigen::MatrixXd U = Eigen::HouseholderQR<Eigen::MatrixXd>(G1).householderQ() *
                      Eigen::MatrixXd::Identity(m, k);
  Eigen::MatrixXd V = Eigen::HouseholderQR<Eigen::MatrixXd>(G2).householderQ() *
                      Eigen::MatrixXd::Identity(n, k);
  Eigen::VectorXd s(k);
  for (int i = 0; i < k; ++i) {
    s[i] = std::exp(-kind.decay_rate * static_cast<double>(i) / static_cast<double>(k - 1));
  }
  Eigen::MatrixXd A = U * s.asDiagonal() * V.transpose();

  if (kind.tag == MatrixTag::TypeII_CorrelatedCols) {
    if (!(kind.corr_fraction > 0.0) || !(kind.corr_fraction < 1.0)) {
      throw std::invalid_argument("gen_matrix: corr_fraction must lie in (0, 1)");
    }
    const int kk = static_cast<int>(std::ceil(kind.corr_fraction * n));
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < kk; ++i) {
      auto j = static_cast<std::size_t>(i) +
               static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    const int retained = n - kk;
    Eigen::VectorXd g(m);
    for (int i = 0; i < kk; ++i) {
      int col = idx[static_cast<std::size_t>(i)];
      int base =
          idx[static_cast<std::size_t>(kk) +
              static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(retained)))];
      for (int r = 0; r < m; ++r) g[r] = rng.normal();
      g /= g.norm();
      A.col(col) = A.col(base) + kind.corr_noise * A.col(base).norm() * g;
    }
  }
  return A;
}

Eigen::VectorXd gen_sparse_signal(int n, int nnz, std::uint64_t seed) {
  if (nnz < 1 || nnz > n) {
    throw std::invalid_argument("gen_sparse_signal: need 1 <= nnz <= n");
  }
  Rng rng(seed);
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < nnz; ++i) {
    auto j = static_cast<std::size_t>(i) +
             static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < nnz; ++i) x[idx[static_cast<std::size_t>(i)]] = rng.normal();
  return x;
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& v, double fraction, std::uint64_t seed) {
  if (fraction < 0.0) throw std::invalid_argument("add_noise: fraction must be >= 0");
  if (fraction == 0.0) return v;
  double vn = v.norm();
  if (vn == 0.0) {
    throw std::runtime_error("add_noise: cannot scale noise relative to a zero vector");
  }
  Rng rng(seed);
  Eigen::VectorXd e(v.size());
  double en = 0.0;
  do {
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rng.normal();
    en = e.norm();
  } while (en == 0.0);
  return v + (fraction * vn / en) * e;
}

double percent_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  double tn = truth.norm();
  if (tn == 0.0) throw std::domain_error("percent_error: truth vector is zero");
  return 100.0 * (estimate - truth).norm() / tn;
}

SweepOptions::SweepOptions() {
  base.threshold = ThresholdRule::Soft;
  base.line_search.method = LineSearchMethod::Backtracking;
  base.debris_kappa = 1.0;
}

namespace {

double median_of(std::vector<double> v) {
  for (double x : v) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SweepTable sweep_contours(const MatrixKind& kind, int m, int n,
                          const std::vector<int>& nnz_grid,
                          const std::vector<double>& noise_grid,
                          const std::vector<PathSolver>& solvers, int trials,
                          std::uint64_t seed, const SweepOptions* opts_in) {
  if (nnz_grid.empty() || noise_grid.empty() || solvers.empty()) {
    throw std::invalid_argument("sweep_contours: grids and solver set must be non-empty");
  }
  if (trials < 1) throw std::invalid_argument("sweep_contours: trials must be >= 1");
  SweepOptions defaults;
  const SweepOptions& opts = opts_in ? *opts_in : defaults;

  SweepTable table;
  for (std::size_t ni = 0; ni < nnz_grid.size(); ++ni) {
    for (std::size_t fj = 0; fj < noise_grid.size(); ++fj) {
      const std::uint64_t cell = ni * noise_grid.size() + fj;
      // per-solver collection of min-over-tau percent errors
      std::vector<std::vector<double>> mins(solvers.size());
      for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t base = hash_seed(seed, cell, static_cast<std::uint64_t>(trial));
        try {
          Eigen::MatrixXd A = gen_matrix(kind, m, n, hash_seed(base, 101));
          Eigen::VectorXd xt = gen_sparse_signal(n, nnz_grid[ni], hash_seed(base, 202));
          Eigen::VectorXd bclean = A * xt;
          Eigen::VectorXd b = add_noise(bclean, noise_grid[fj], hash_seed(base, 303));
          ProblemData prob(std::move(A), std::move(b), xt);
          TauGrid grid = tau_grid(prob, opts.tau_points, opts.start_div, opts.end_div);
          for (std::size_t si = 0; si < solvers.size(); ++si) {
            SolverConfig cfg = opts.base;
            cfg.max_iters = (solvers[si] == PathSolver::ISTA || solvers[si] == PathSolver::FISTA)
                                ? opts.prox_iters
                                : opts.smooth_iters;
            try {
              auto records = run_path(prob, solvers[si], cfg, grid);
              double best = std::numeric_limits<double>::infinity();
              for (const auto& r : records) {
                if (r.percent_error && *r.percent_error < best) best = *r.percent_error;
              }
              mins[si].push_back(best);
            } catch (const std::exception&) {
              mins[si].push_back(std::numeric_limits<double>::quiet_NaN());
            }
          }
        } catch (const std::exception&) {
          for (auto& v : mins) v.push_back(std::numeric_limits<double>::quiet_NaN());
        }
      }
      for (std::size_t si = 0; si < solvers.size(); ++si) {
        SweepRow row;
        row.nnz = nnz_grid[ni];
        row.noise_fraction = noise_grid[fj];
        row.solver = solvers[si];
        row.median_min_percent_error = median_of(mins[si]);
        table.push_back(row);
      }
    }
  }
  return table;
}

}  // namespace erfmin
