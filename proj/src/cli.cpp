#include "erfmin/cli_io.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "erfmin/rng.hpp"

namespace erfmin {

namespace {

// Option/validation problems found after CLI11 parsing; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemOpts {
  std::string matrix_kind = "type1";
  int m = 200;
  int n = 200;
  int nnz = 20;
  double noise = 0.1;
  std::string noise_target = "b";
  std::uint64_t seed = 1;
  std::string matrix_file;
  std::string rhs_file;
  std::string truth_file;
  std::string signal_file;
};

struct SolverOpts {
  std::string solver = "cg";
  double p = 1.0;
  double tau = 0.0;  // 0 = auto: |A^T b|_inf / 100
  double sigma0 = 0.0;
  double alpha = 0.8;
  int iters = 50;
  std::string line_search = "backtracking";
  std::string threshold = "auto";
  std::string smoother = "convphi";
  double kappa = 0.0;
};

struct GridOpts {
  int tau_points = 30;
  double tau_start_div = 10.0;
  double tau_end_div = 5e8;
};

MatrixKind parse_matrix_kind(const std::string& s) {
  MatrixKind k;
  if (s == "type1")
    k.tag = MatrixTag::TypeI_GaussianDecay;
  else if (s == "type2")
    k.tag = MatrixTag::TypeII_CorrelatedCols;
  else if (s == "type3")
    k.tag = MatrixTag::TypeIII_Cauchy;
  else
    throw UsageError("--matrix-kind must be type1, type2, or type3 (got '" + s + "')");
  return k;
}

SmoothingKind parse_smoother(const std::string& s) {
  if (s == "convphi") return SmoothingKind::ConvPhi;
  if (s == "convphi-shifted") return SmoothingKind::ConvPhiShifted;
  if (s == "convphi-hat") return SmoothingKind::ConvPhiHat;
  if (s == "convphi-gauss-shift") return SmoothingKind::ConvPhiGaussShift;
  if (s == "sqrt-eps") return SmoothingKind::SqrtEps;
  if (s == "huber") return SmoothingKind::Huber;
  throw UsageError("--smoother must be one of convphi, convphi-shifted, convphi-hat, "
                   "convphi-gauss-shift, sqrt-eps, huber (got '" + s + "')");
}

LineSearchMethod parse_line_search(const std::string& s) {
  if (s == "backtracking") return LineSearchMethod::Backtracking;
  if (s == "taylor") return LineSearchMethod::TaylorHessian;
  if (s == "secant") return LineSearchMethod::SecantFD;
  throw UsageError("--line-search must be backtracking, taylor, or secant (got '" + s + "')");
}

ThresholdRule parse_threshold(const std::string& s, double p) {
  if (s == "auto") return p < 1.0 ? ThresholdRule::Hard : ThresholdRule::Soft;
  if (s == "soft") return ThresholdRule::Soft;
  if (s == "hard") return ThresholdRule::Hard;
  if (s == "optimality") return ThresholdRule::Optimality;
  throw UsageError("--threshold must be auto, soft, hard, or optimality (got '" + s + "')");
}

PathSolver parse_path_solver(const std::string& s) {
  if (s == "sd") return PathSolver::SD;
  if (s == "cg") return PathSolver::CG;
  if (s == "sandwich") return PathSolver::CGNewtonSandwich;
  if (s == "ista") return PathSolver::ISTA;
  if (s == "fista") return PathSolver::FISTA;
  throw UsageError("--solver must be sd, cg, sandwich, ista, or fista (got '" + s + "')");
}

void validate_problem(const ProblemOpts& o, bool allow_files) {
  if (!allow_files && (!o.matrix_file.empty() || !o.rhs_file.empty() || !o.truth_file.empty() ||
                       !o.signal_file.empty()))
    throw UsageError("file inputs are not accepted by this subcommand");
  if (!o.matrix_file.empty()) {
    if (o.rhs_file.empty()) throw UsageError("--matrix requires --rhs");
    return;  // dimensions come from the files
  }
  if (!o.rhs_file.empty() || !o.truth_file.empty())
    throw UsageError("--rhs/--truth require --matrix");
  parse_matrix_kind(o.matrix_kind);
  if (o.m < 2 || o.n < 2) throw UsageError("--m and --n must be at least 2");
  if (o.nnz < 1 || o.nnz > o.n) throw UsageError("--nnz must be between 1 and n");
  if (!(o.noise >= 0.0)) throw UsageError("--noise must be nonnegative");
  if (o.noise_target != "b" && o.noise_target != "x")
    throw UsageError("--noise-target must be b or x");
}

void validate_solver(const SolverOpts& s) {
  if (!(s.p > 0.0 && s.p <= 1.0)) throw UsageError("--p must lie in (0, 1]");
  const SmoothingKind kind = parse_smoother(s.smoother);
  if (s.p < 1.0 && kind != SmoothingKind::ConvPhi)
    throw UsageError("--p < 1 requires --smoother convphi");
  if (!(s.tau >= 0.0)) throw UsageError("--tau must be nonnegative");
  if (!(s.sigma0 >= 0.0)) throw UsageError("--sigma0 must be nonnegative (0 = automatic)");
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (s.iters < 1) throw UsageError("--iters must be positive");
  if (!(s.kappa >= 0.0)) throw UsageError("--kappa must be nonnegative");
  parse_line_search(s.line_search);
  parse_threshold(s.threshold, s.p);
}

void validate_grid(const GridOpts& g) {
  if (g.tau_points < 2) throw UsageError("--tau-points must be at least 2");
  if (!(g.tau_start_div >= 1.0)) throw UsageError("--tau-start-div must be at least 1");
  if (!(g.tau_end_div > g.tau_start_div))
    throw UsageError("--tau-end-div must exceed --tau-start-div");
}

SolverConfig make_config(const SolverOpts& s) {
  SolverConfig cfg;
  cfg.tau = s.tau;
  cfg.p = s.p;
  cfg.sigma0 = s.sigma0;
  cfg.alpha = s.alpha;
  cfg.max_iters = s.iters;
  cfg.kind = parse_smoother(s.smoother);
  cfg.line_search.method = parse_line_search(s.line_search);
  cfg.threshold = parse_threshold(s.threshold, s.p);
  cfg.debris_kappa = s.kappa;
  return cfg;
}

// Deterministic sub-seeds matching a single sweep cell (cell 0, trial 0), so
// `path`/`solve` on generated data reproduce exactly what `sweep` sees.
struct DerivedSeeds {
  std::uint64_t matrix, signal, noise;
};

DerivedSeeds derive_seeds(std::uint64_t master) {
  const std::uint64_t base = hash_seed(master, 0, 0);
  return {hash_seed(base, 101), hash_seed(base, 202), hash_seed(base, 303)};
}

struct BuiltProblem {
  ProblemData prob;
  Eigen::MatrixXd A;             // kept for `generate` output
  Eigen::VectorXd clean_signal;  // empty when the problem came from files
};

BuiltProblem build_problem(const ProblemOpts& o) {
  if (!o.matrix_file.empty()) {
    Eigen::MatrixXd A = read_matrix(o.matrix_file);
    Eigen::VectorXd b = read_vector(o.rhs_file);
    if (b.size() != A.rows())
      throw UsageError("--rhs length " + std::to_string(b.size()) +
                       " does not match matrix rows " + std::to_string(A.rows()));
    std::optional<Eigen::VectorXd> truth;
    if (!o.truth_file.empty()) {
      truth = read_vector(o.truth_file);
      if (truth->size() != A.cols())
        throw UsageError("--truth length does not match matrix columns");
    }
    BuiltProblem out{ProblemData(A, b, truth), std::move(A), Eigen::VectorXd()};
    return out;
  }

  const MatrixKind kind = parse_matrix_kind(o.matrix_kind);
  const DerivedSeeds seeds = derive_seeds(o.seed);
  Eigen::MatrixXd A = gen_matrix(kind, o.m, o.n, seeds.matrix);
  Eigen::VectorXd xt = o.signal_file.empty() ? gen_sparse_signal(o.n, o.nnz, seeds.signal)
                                             : read_vector(o.signal_file);
  if (xt.size() != A.cols())
    throw UsageError("--signal length does not match matrix columns");

  Eigen::VectorXd b;
  if (o.noise_target == "x") {
    const Eigen::VectorXd x_noisy = add_noise(xt, o.noise, seeds.noise);
    b = A * x_noisy;
  } else {
    b = add_noise(A * xt, o.noise, seeds.noise);
  }
  BuiltProblem out{ProblemData(A, b, xt), std::move(A), std::move(xt)};
  return out;
}

double auto_tau(const ProblemData& prob) { return prob.atb.lpNorm<Eigen::Infinity>() / 100.0; }

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// ---------------------------------------------------------------- generate

int run_generate(const ProblemOpts& po, const std::string& out_dir) {
  validate_problem(po, /*allow_files=*/false);
  BuiltProblem bp = build_problem(po);
  std::filesystem::create_directories(out_dir);
  write_matrix(bp.A, join_path(out_dir, "A.mtx"));
  write_vector(bp.clean_signal, join_path(out_dir, "x.mtx"));
  write_vector(bp.prob.b, join_path(out_dir, "b.mtx"));
  std::cout << "wrote " << join_path(out_dir, "A.mtx") << " (" << bp.A.rows() << "x"
            << bp.A.cols() << "), x.mtx (nnz=" << (bp.clean_signal.array() != 0.0).count()
            << "), b.mtx\n";
  return 0;
}

// ------------------------------------------------------------------- solve

int run_solve(const ProblemOpts& po, const SolverOpts& so, const std::string& out_dir) {
  validate_problem(po, /*allow_files=*/true);
  validate_solver(so);
  if (so.solver != "sd" && so.solver != "cg" && so.solver != "newton" &&
      so.solver != "sandwich" && so.solver != "ista" && so.solver != "fista")
    throw UsageError("--solver must be sd, cg, newton, sandwich, ista, or fista (got '" +
                     so.solver + "')");

  BuiltProblem bp = build_problem(po);
  const ProblemData& prob = bp.prob;
  SolverConfig cfg = make_config(so);
  if (cfg.tau <= 0.0) cfg.tau = auto_tau(prob);

  std::filesystem::create_directories(out_dir);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(prob.n());

  Eigen::VectorXd x;
  int iters_done = cfg.max_iters;
  bool have_trace = false;
  IterateTrace trace;

  if (so.solver == "ista") {
    x = ista(prob, cfg.tau, cfg.max_iters, x0);
  } else if (so.solver == "fista") {
    x = fista(prob, cfg.tau, cfg.max_iters, x0);
  } else if (so.solver == "sandwich") {
    TauGrid single;
    single.values = {cfg.tau};
    single.tau_max = cfg.tau;
    auto recs = run_path(prob, PathSolver::CGNewtonSandwich, cfg, single);
    x = recs.front().solution;
    iters_done = recs.front().iterations;
  } else {
    SolveResult res;
    if (so.solver == "sd")
      res = steepest_descent(prob, cfg, x0);
    else if (so.solver == "cg")
      res = nonlinear_cg(prob, cfg, x0);
    else
      res = newton(prob, cfg, x0);
    x = std::move(res.x);
    trace = std::move(res.trace);
    have_trace = true;
    iters_done = static_cast<int>(trace.size());
  }

  write_vector(x, join_path(out_dir, "solution.mtx"));
  if (have_trace) write_trace(trace, join_path(out_dir, "trace.csv"));

  const double rnorm = (prob.A * x - prob.b).norm();
  const double f1 = f_p_value(prob, x, 1.0, cfg.tau);
  std::cout << "solver=" << so.solver << " tau=" << format_g17(cfg.tau)
            << " iterations=" << iters_done << " residual_norm=" << format_g17(rnorm)
            << " f1_value=" << format_g17(f1) << " nnz=" << (x.array() != 0.0).count();
  if (prob.truth) std::cout << " percent_error=" << format_g17(percent_error(x, *prob.truth));
  std::cout << "\nwrote " << join_path(out_dir, "solution.mtx")
            << (have_trace ? " and trace.csv" : "") << "\n";
  return 0;
}

// -------------------------------------------------------------------- path

int run_path_cmd(const ProblemOpts& po, const SolverOpts& so, const GridOpts& go,
                 const std::string& out_file) {
  validate_problem(po, /*allow_files=*/true);
  validate_solver(so);
  validate_grid(go);
  const PathSolver solver = parse_path_solver(so.solver);

  BuiltProblem bp = build_problem(po);
  const SolverConfig cfg = make_config(so);
  const TauGrid grid = tau_grid(bp.prob, go.tau_points, go.tau_start_div, go.tau_end_div);
  const std::vector<PathRecord> recs = run_path(bp.prob, solver, cfg, grid);
  write_records(recs, out_file);

  std::cout << "wrote " << recs.size() << " path records to " << out_file << "\n";
  if (bp.prob.truth) {
    double best = std::numeric_limits<double>::infinity();
    double best_tau = grid.tau_max;
    for (const auto& r : recs)
      if (r.percent_error && *r.percent_error < best) {
        best = *r.percent_error;
        best_tau = r.tau;
      }
    std::cout << "min percent_error=" << format_g17(best) << " at tau=" << format_g17(best_tau)
              << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------- sweep

int run_sweep(const ProblemOpts& po, const SolverOpts& so, const GridOpts& go,
              const std::vector<int>& nnz_grid, const std::vector<double>& noise_grid,
              const std::vector<std::string>& solver_names, int trials,
              const std::string& out_file) {
  const MatrixKind kind = parse_matrix_kind(po.matrix_kind);
  if (po.m < 2 || po.n < 2) throw UsageError("--m and --n must be at least 2");
  if (nnz_grid.empty()) throw UsageError("--nnz needs at least one value");
  for (int k : nnz_grid)
    if (k < 1 || k > po.n) throw UsageError("--nnz values must be between 1 and n");
  if (noise_grid.empty()) throw UsageError("--noise needs at least one value");
  for (double f : noise_grid)
    if (!(f >= 0.0)) throw UsageError("--noise values must be nonnegative");
  if (solver_names.empty()) throw UsageError("--solver needs at least one value");
  if (trials < 1) throw UsageError("--trials must be positive");
  validate_solver(so);
  validate_grid(go);

  std::vector<PathSolver> solvers;
  for (const auto& name : solver_names) solvers.push_back(parse_path_solver(name));

  SweepOptions opts;
  opts.base = make_config(so);
  opts.smooth_iters = so.iters;
  opts.prox_iters = 2 * so.iters;
  opts.tau_points = go.tau_points;
  opts.start_div = go.tau_start_div;
  opts.end_div = go.tau_end_div;

  const SweepTable table =
      sweep_contours(kind, po.m, po.n, nnz_grid, noise_grid, solvers, trials, po.seed, &opts);
  write_records(table, out_file);
  std::cout << "wrote " << table.size() << " sweep rows to " << out_file << "\n";
  return 0;
}

// -------------------------------------------------------------- image-demo

int run_image_demo(const ProblemOpts& po, const SolverOpts& so, const GridOpts& go,
                   const std::string& out_file) {
  validate_solver(so);
  validate_grid(go);

  // Reconstruction benchmark: a sparse scene observed through an
  // ill-conditioned operator, with noise applied to the scene itself and
  // accuracy judged against the clean scene.
  const DerivedSeeds seeds = derive_seeds(po.seed);
  Eigen::MatrixXd A;
  Eigen::VectorXd xt;
  if (!po.matrix_file.empty()) {
    A = read_matrix(po.matrix_file);
    xt = po.signal_file.empty() ? gen_sparse_signal(static_cast<int>(A.cols()), po.nnz,
                                                    seeds.signal)
                                : read_vector(po.signal_file);
  } else {
    ProblemOpts gen = po;
    gen.noise_target = "x";
    validate_problem(gen, /*allow_files=*/true);
    A = gen_matrix(parse_matrix_kind(po.matrix_kind), po.m, po.n, seeds.matrix);
    xt = po.signal_file.empty() ? gen_sparse_signal(po.n, po.nnz, seeds.signal)
                                : read_vector(po.signal_file);
  }
  if (xt.size() != A.cols()) throw UsageError("--signal length does not match matrix columns");
  if (!(po.noise >= 0.0)) throw UsageError("--noise must be nonnegative");

  const Eigen::VectorXd x_noisy = add_noise(xt, po.noise, seeds.noise);
  const ProblemData prob(A, A * x_noisy, xt);
  const TauGrid grid = tau_grid(prob, go.tau_points, go.tau_start_div, go.tau_end_div);

  SolverConfig base = make_config(so);
  base.p = 1.0;
  base.threshold = ThresholdRule::Soft;
  SolverConfig cg083 = base;
  cg083.p = 0.83;
  cg083.kind = SmoothingKind::ConvPhi;
  cg083.threshold = ThresholdRule::Hard;

  struct Method {
    std::string label;
    PathSolver solver;
    SolverConfig cfg;
    int iters;
  };
  const std::vector<Method> methods = {
      {"FISTA", PathSolver::FISTA, base, 2 * so.iters},
      {"CG", PathSolver::CG, base, so.iters},
      {"CGNewtonSandwich", PathSolver::CGNewtonSandwich, base, so.iters},
      {"CG_p0.83", PathSolver::CG, cg083, so.iters},
  };

  std::string csv = "solver,percent_error\n";
  for (const auto& mth : methods) {
    SolverConfig cfg = mth.cfg;
    cfg.max_iters = mth.iters;
    const auto recs = run_path(prob, mth.solver, cfg, grid);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : recs)
      if (r.percent_error && *r.percent_error < best) best = *r.percent_error;
    csv += mth.label + "," + format_g17(best) + "\n";
    std::cout << mth.label << " percent_error=" << format_g17(best) << "\n";
  }
  write_text(out_file, csv);
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Sparse regularized least-squares solvers built on smooth surrogates of |x|"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  // Per-subcommand option blocks so each subcommand advertises and uses its
  // own defaults.
  ProblemOpts po_gen, po_solve, po_path, po_sweep, po_image;
  SolverOpts so_solve, so_path, so_sweep, so_image;
  GridOpts go_path, go_sweep, go_image;
  po_image.matrix_kind = "type2";
  po_image.m = 500;
  po_image.n = 525;
  po_image.noise = 0.25;
  so_image.kappa = 1.0;

  std::vector<int> nnz_grid;
  std::vector<double> noise_grid;
  std::vector<std::string> solver_names;
  int trials = 1;
  std::string out_gen = ".";
  std::string out_solve = ".";
  std::string out_path = "path.csv";
  std::string out_sweep = "sweep.csv";
  std::string out_image = "image_demo.csv";

  auto add_gen_flags = [](CLI::App* cmd, ProblemOpts& o) {
    cmd->add_option("--matrix-kind", o.matrix_kind,
                    "Test matrix family: type1 (decaying spectrum), type2 (correlated columns), "
                    "type3 (heavy-tailed)");
    cmd->add_option("--m", o.m, "Rows of the generated matrix");
    cmd->add_option("--n", o.n, "Columns of the generated matrix");
    cmd->add_option("--seed", o.seed, "Master seed for generation");
  };
  auto add_signal_flags = [](CLI::App* cmd, ProblemOpts& o) {
    cmd->add_option("--nnz", o.nnz, "Nonzeros in the generated sparse signal");
    cmd->add_option("--noise", o.noise, "Relative noise fraction");
  };
  auto add_file_flags = [](CLI::App* cmd, ProblemOpts& o, bool with_rhs) {
    cmd->add_option("--matrix", o.matrix_file, "Read the operator from a MatrixMarket file");
    if (with_rhs) {
      cmd->add_option("--rhs", o.rhs_file, "Right-hand side vector file (requires --matrix)");
      cmd->add_option("--truth", o.truth_file,
                      "Ground-truth vector file for percent-error reporting");
    }
    cmd->add_option("--signal", o.signal_file, "Clean sparse signal vector file");
  };
  auto add_solver_flags = [](CLI::App* cmd, SolverOpts& s, bool with_solver, bool with_tau) {
    if (with_solver) cmd->add_option("--solver", s.solver, "Solver");
    cmd->add_option("--p", s.p, "Sparsity exponent in (0,1]; p<1 requires --smoother convphi");
    if (with_tau) cmd->add_option("--tau", s.tau, "Regularization weight (0 = |A^T b|_inf/100)");
    cmd->add_option("--sigma0", s.sigma0, "Initial smoothing width (0 = automatic)");
    cmd->add_option("--alpha", s.alpha, "Annealing factor in (0,1)");
    cmd->add_option("--iters", s.iters,
                    "Iteration budget for smooth solvers (proximal baselines get 2x)");
    cmd->add_option("--line-search", s.line_search, "backtracking, taylor, or secant");
    cmd->add_option("--threshold", s.threshold,
                    "auto, soft, hard, or optimality (auto: soft for p=1, hard for p<1)");
    cmd->add_option("--smoother", s.smoother,
                    "convphi, convphi-shifted, convphi-hat, convphi-gauss-shift, sqrt-eps, huber");
    cmd->add_option("--kappa", s.kappa,
                    "Debris-floor multiple of sigma: components at or below kappa*sigma are "
                    "zeroed after thresholding (0 = off)");
  };
  auto add_grid_flags = [](CLI::App* cmd, GridOpts& g) {
    cmd->add_option("--tau-points", g.tau_points, "Number of grid points");
    cmd->add_option("--tau-start-div", g.tau_start_div, "Grid starts at |A^T b|_inf / this");
    cmd->add_option("--tau-end-div", g.tau_end_div, "Grid ends at |A^T b|_inf / this");
  };

  CLI::App* gen = app.add_subcommand(
      "generate", "Generate a synthetic problem (A.mtx, x.mtx, b.mtx) into a directory");
  add_gen_flags(gen, po_gen);
  add_signal_flags(gen, po_gen);
  gen->add_option("--noise-target", po_gen.noise_target,
                  "Where noise is applied: b (observation) or x (signal)");
  gen->add_option("--out", out_gen, "Output directory");

  CLI::App* solve = app.add_subcommand(
      "solve", "Solve one instance at a fixed tau; writes solution.mtx (+ trace.csv)");
  add_gen_flags(solve, po_solve);
  add_signal_flags(solve, po_solve);
  solve->add_option("--noise-target", po_solve.noise_target,
                    "Where generated noise is applied: b or x");
  add_file_flags(solve, po_solve, true);
  add_solver_flags(solve, so_solve, true, true);
  solve->add_option("--out", out_solve, "Output directory");

  CLI::App* path = app.add_subcommand(
      "path", "Warm-started solve along a descending tau grid; writes a CSV of records");
  add_gen_flags(path, po_path);
  add_signal_flags(path, po_path);
  path->add_option("--noise-target", po_path.noise_target,
                   "Where generated noise is applied: b or x");
  add_file_flags(path, po_path, true);
  add_solver_flags(path, so_path, true, false);
  add_grid_flags(path, go_path);
  path->add_option("--out", out_path, "Output CSV file");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Median min-over-tau percent error per (nnz, noise, solver) cell");
  add_gen_flags(sweep, po_sweep);
  sweep->add_option("--nnz", nnz_grid, "Signal nonzero counts (comma separated)")->delimiter(',');
  sweep->add_option("--noise", noise_grid, "Noise fractions applied to b (comma separated)")
      ->delimiter(',');
  sweep->add_option("--solver", solver_names, "Solvers (comma separated)")->delimiter(',');
  sweep->add_option("--trials", trials, "Trials per cell");
  add_solver_flags(sweep, so_sweep, false, false);
  add_grid_flags(sweep, go_sweep);
  sweep->add_option("--out", out_sweep, "Output CSV file");

  CLI::App* image = app.add_subcommand(
      "image-demo", "Reconstruction shootout: FISTA vs CG vs CG+Newton vs CG(p=0.83)");
  add_gen_flags(image, po_image);
  add_signal_flags(image, po_image);
  add_file_flags(image, po_image, false);
  image->add_option("--sigma0", so_image.sigma0, "Initial smoothing width (0 = automatic)");
  image->add_option("--alpha", so_image.alpha, "Annealing factor in (0,1)");
  image->add_option("--iters", so_image.iters,
                    "Iteration budget for smooth solvers (FISTA gets 2x)");
  image->add_option("--line-search", so_image.line_search, "backtracking, taylor, or secant");
  image->add_option("--kappa", so_image.kappa, "Debris-floor multiple of sigma (0 = off)");
  add_grid_flags(image, go_image);
  image->add_option("--out", out_image, "Output CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return run_generate(po_gen, out_gen);
    if (*solve) return run_solve(po_solve, so_solve, out_solve);
    if (*path) return run_path_cmd(po_path, so_path, go_path, out_path);
    if (*sweep)
      return run_sweep(po_sweep, so_sweep, go_sweep, nnz_grid, noise_grid, solver_names, trials,
                       out_sweep);
    if (*image) return run_image_demo(po_image, so_image, go_image, out_image);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace erfmin
