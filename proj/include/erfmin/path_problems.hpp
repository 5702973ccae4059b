#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "erfmin/objectives.hpp"
#include "erfmin/solvers.hpp"

namespace erfmin {

// Descending geometric grid of regularization weights.
struct TauGrid {
  std::vector<double> values;  // strictly decreasing
  double tau_max = 0.0;        // |A^T b|_inf
};

enum class MatrixTag { TypeI_GaussianDecay, TypeII_CorrelatedCols, TypeIII_Cauchy };

struct MatrixKind {
  MatrixTag tag = MatrixTag::TypeI_GaussianDecay;
  double decay_rate = 6.0;      // singular values span exp(-decay_rate)
  double corr_fraction = 0.2;   // fraction of columns overwritten (Type II)
  double corr_noise = 0.01;     // relative perturbation of copied columns
};

const char* to_string(MatrixTag tag);

struct PathRecord {
  double tau = 0.0;
  Eigen::VectorXd solution;
  double residual_norm = 0.0;
  std::optional<double> percent_error;  // present iff ground truth is known
  double f1_value = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
};

enum class PathSolver { SD, CG, CGNewtonSandwich, ISTA, FISTA };

const char* to_string(PathSolver s);

// Geometric grid from |A^T b|_inf/start_div down to |A^T b|_inf/end_div.
TauGrid tau_grid(const ProblemData& prob, int n_points, double start_div = 10.0,
                 double end_div = 5e8);

// Warm-started execution along the grid: each tau starts from the previous
// solution (zero at the first), sigma resets to its starting rule at each
// tau.  cfg.tau is overridden per grid point; cfg.max_iters is the per-tau
// budget.  CGNewtonSandwich splits that budget 60%/10%/30% into
// CG -> Newton -> CG stages with the annealing schedule continuing across
// the stage boundaries.
std::vector<PathRecord> run_path(const ProblemData& prob, PathSolver solver,
                                 const SolverConfig& cfg, const TauGrid& grid);

// Synthetic test matrices.
//  Type I   U diag(s) V^T with orthonormal factors of Gaussian matrices and
//           s_k = exp(-decay_rate (k-1)/(min(m,n)-1))
//  Type II  Type I, then ceil(corr_fraction n) columns overwritten with
//           near-copies of retained columns (relative perturbation corr_noise)
//  Type III independent Cauchy entries (ratio of two unit Gaussians)
// Deterministic per seed.
Eigen::MatrixXd gen_matrix(const MatrixKind& kind, int m, int n, std::uint64_t seed);

// Exactly nnz nonzero entries at uniform positions, values standard Gaussian.
Eigen::VectorXd gen_sparse_signal(int n, int nnz, std::uint64_t seed);

// v + e with Gaussian e rescaled so that |e|_2 = fraction * |v|_2.
Eigen::VectorXd add_noise(const Eigen::VectorXd& v, double fraction, std::uint64_t seed);

// 100 |estimate - truth|_2 / |truth|_2.
double percent_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

struct SweepRow {
  int nnz = 0;
  double noise_fraction = 0.0;
  PathSolver solver = PathSolver::CG;
  double median_min_percent_error = 0.0;
};
using SweepTable = std::vector<SweepRow>;

// Knobs for sweep_contours; the defaults mirror the benchmark protocol
// (50-iteration smooth solvers vs 100-iteration proximal baselines on a
// 30-point grid).
struct SweepOptions {
  SolverConfig base{};  // threshold/line-search/annealing settings shared by runs
  int smooth_iters = 50;
  int prox_iters = 100;
  int tau_points = 30;
  double start_div = 10.0;
  double end_div = 5e8;
  SweepOptions();
};

// For each (nnz, noise) cell and solver: median over trials of the
// min-over-tau percent error.  Noise is applied to b, scaled relative to
// |A x|_2.  Per-trial seeds are derived order-independently from the master
// seed, so any execution order produces the identical table.  A failing cell
// is recorded as NaN without aborting the sweep.
SweepTable sweep_contours(const MatrixKind& kind, int m, int n,
                          const std::vector<int>& nnz_grid,
                          const std::vector<double>& noise_grid,
                          const std::vector<PathSolver>& solvers, int trials,
                          std::uint64_t seed, const SweepOptions* opts = nullptr);

}  // namespace erfmin
