#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "erfmin/path_problems.hpp"
#include "erfmin/solvers.hpp"

namespace erfmin {

// MatrixMarket I/O.  Both the `array` (dense, column-major) and `coordinate`
// (sparse triplet, materialized densely) real formats are accepted; vectors
// are stored as single-column arrays.  Parse errors carry the file name and
// line number.
Eigen::MatrixXd read_matrix(const std::string& path);
Eigen::VectorXd read_vector(const std::string& path);
void write_matrix(const Eigen::MatrixXd& A, const std::string& path);
void write_vector(const Eigen::VectorXd& v, const std::string& path);

// Round-trip exact float formatting (17 significant digits).
std::string format_g17(double v);

// Atomic whole-file text write (staged via a sibling temp file + rename).
void write_text(const std::string& path, const std::string& content);

// CSV writers.  Columns:
//   path records: tau,residual_norm,percent_error,f1_value,iterations,wall_seconds
//                 (percent_error left empty when ground truth is unknown)
//   sweep tables: nnz,noise_fraction,solver,median_min_percent_error
//   traces:       iteration,sigma,h_value,f1_value,residual_norm,mu,nnz,beta,ls_fallback
void write_records(const std::vector<PathRecord>& records, const std::string& path);
void write_records(const SweepTable& table, const std::string& path);
void write_trace(const IterateTrace& trace, const std::string& path);

// Command-line front end; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace erfmin
