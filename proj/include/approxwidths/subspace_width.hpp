#pragma once

// Kolmogorov n-width of a finite point cloud in R^d:
//
//   d_n(X) = min over n-dimensional subspaces S of max_i dist(x_i, S).
//
// The problem is nonconvex, so results are certified brackets:
//  - upper bounds come from explicit subspaces (spectral subspace, Grassmannian
//    descent on a smoothed max, branch-and-bound candidates);
//  - lower bounds come from weak duality: for any probability weights w,
//      max_i r_i(S)^2 >= sum_i w_i r_i(S)^2 >= sum of the d-n smallest
//      eigenvalues of sum_i w_i x_i x_i^T,
//    and, for d <= 3 and n <= 2, from a Lipschitz branch-and-bound over the
//    Grassmannian.

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace approxwidths {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class WidthMethod { exact_reduction, spectral_upper, search, sweep, sampled };

const char* to_string(WidthMethod m);

struct WidthOptions {
  int starts = 6;              ///< descent starts (spectral, best dual, then random)
  int descent_iterations = 240;
  int dual_iterations = 400;
  std::uint64_t seed = 0;
  bool use_sweep = true;       ///< branch-and-bound when d <= 3 and n <= 2
  double sweep_gap = 1e-7;     ///< relative to the largest point norm
  Index sweep_max_cells = 400000;
  double value_tol = 1e-9;     ///< bounds closer than this (relative) report a value
};

struct SubspaceWidth {
  Index n = 0;
  double lower = 0.0;
  double upper = 0.0;
  MatrixXd basis;        ///< d x n orthonormal basis achieving `upper`
  WidthMethod method = WidthMethod::search;
  VectorXd dual_weights;  ///< weights certifying `lower` (empty when not used)
  bool sweep_used = false;
};

/// max_i |(I - B B^T) x_i| for an orthonormal basis B (d x n) and points as columns.
double max_residual(const MatrixXd& points, const MatrixXd& basis);

/// Certified bracket for the n-width of the columns of `points`.
SubspaceWidth kolmogorov_width(const MatrixXd& points, Index n, const WidthOptions& opts = {});

struct SweepResult {
  double lower = 0.0;
  double upper = 0.0;
  VectorXd direction;  ///< line direction (n = 1) or plane normal (n = 2, d = 3)
  Index cells = 0;
  bool complete = false;  ///< gap target reached before the cell cap
};

/// Lipschitz branch-and-bound over lines (d = 2, 3) or planes (d = 3).
SweepResult grassmann_sweep(const MatrixXd& points, Index n, double gap, Index max_cells);

}  // namespace approxwidths
