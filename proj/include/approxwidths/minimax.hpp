#pragma once

#include <vector>

#include "approxwidths/spaces.hpp"

namespace approxwidths {

struct MinimaxOptions {
  int max_iterations = 100;
  /// Allowed gap between the grid max error and the levelled reference error
  /// (relative to max(1, |f|_inf)) before the result is flagged near-best.
  double tolerance = 1e-6;
};

/// Discrete best uniform polynomial approximation on a grid.
struct MinimaxResult {
  VectorXd coefficients;  ///< Chebyshev coefficients on the interval mapped to [-1, 1]
  VectorXd approximant;   ///< polynomial values on the grid nodes
  double error = 0.0;     ///< max_i |f_i - p(t_i)|, an upper bound on the minimax error
  double levelled_error = 0.0;  ///< |h| on the final reference, a lower bound
  std::vector<Index> reference;  ///< alternation nodes (grid indices, increasing)
  VectorXd reference_errors;     ///< signed f - p at the reference nodes
  int iterations = 0;
  bool converged = false;

  double defect() const { return error - levelled_error; }
};

/// Chebyshev-basis Vandermonde matrix T_j(s_i), j = 0..degree, with the grid
/// mapped affinely onto [-1, 1].
MatrixXd chebyshev_vandermonde(const Grid& grid, Index degree);

/// Best approximation of f by polynomials of degree <= `degree` in the max norm
/// over the grid nodes, computed with the multi-point exchange on the discrete
/// set. The levelled error never decreases between iterations; if the exchange
/// stalls the best iterate is returned with converged = false.
MinimaxResult discrete_minimax(const Grid& grid, const VectorXd& f, Index degree,
                               const MinimaxOptions& options = {});

}  // namespace approxwidths
