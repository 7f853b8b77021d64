#pragma once

#include <optional>
#include <span>
#include <vector>

#include "approxwidths/schemes.hpp"
#include "approxwidths/sequences.hpp"

namespace approxwidths {

enum class Verdict { evidence_compact, evidence_noncompact, inconclusive };

const char* to_string(Verdict v);

/// alpha_n = E(M, A_n) = max_{x in M} E(x, A_n) for n = 0..horizon.
struct ErrorProfile {
  Scheme scheme;
  VectorXd values;
  VectorXd lower;              ///< certified lower bounds (differ from values only for near-best minimax)
  std::vector<Index> argmax;   ///< family member attaining alpha_n
  Index horizon = 0;
  Index family_size = 0;
  bool any_near_best = false;
  double tolerance = 0.0;      ///< solver tolerance used

  /// alpha_{n+1} <= alpha_n + tol for every n.
  bool monotone(double tol) const;
};

ErrorProfile error_profile(std::span<const Element> family, const Scheme& s, Index horizon,
                           const MinimaxOptions& opts = {});

struct CompactnessOptions {
  double tol = 1e-6;          ///< trailing profile threshold for evidence-compact
  double stall_ratio = 0.5;   ///< alpha_N / alpha_0 at or above this counts as a stall
  /// Relative growth of the norm envelope over the trailing half of the family
  /// above which the family is reported unbounded.
  double growth_tol = 0.05;
  std::optional<double> norm_bound;  ///< explicit bound; replaces the envelope test
};

struct CompactnessReport {
  Verdict verdict = Verdict::inconclusive;
  bool bounded = true;
  double max_norm = 0.0;
  double envelope_growth = 0.0;  ///< max norm over family / max over its first half, minus 1
  double decay_statistic = 0.0;  ///< alpha_N / alpha_0 (0 when alpha_0 = 0)
  ErrorProfile profile;
  CompactnessOptions options;
};

/// Grid-level evidence for: M relatively compact iff bounded and E(M, A_n) -> 0.
CompactnessReport compactness_test(std::span<const Element> family, const Scheme& s, Index horizon,
                                   const CompactnessOptions& opts = {});

struct NetResult {
  std::vector<Element> centers;
  std::vector<Index> center_indices;  ///< positions of the centers in the input
  double radius = 0.0;
  std::vector<bool> covered;
  std::vector<Index> assignment;      ///< nearest center (index into centers) per input point
  VectorXd center_distance;           ///< distance of each point to its nearest center
  Index iterations = 0;
};

/// Greedy farthest-point traversal: start from the first point and keep adding
/// the point farthest from the current centers (lowest index on ties) until
/// every point lies within `radius` of a center.
NetResult epsilon_net(std::span<const Element> family, double radius);

struct ShiftDecomposition {
  Index N = 0;                       ///< first index with E(M, A_N) <= 1/2
  double profile_at_N = 0.0;
  std::vector<Element> approximants;  ///< a(x) in A_N
  std::vector<Element> remainders;    ///< y(x) = x - a(x)
  double max_remainder_norm = 0.0;
  double reconstruction_defect = 0.0;  ///< max_x |a(x) + y(x) - x|
};

/// M ⊆ A_N + M' with M' inside the unit ball, using near-best approximants
/// (|x - a(x)| <= 2 E(x, A_N) <= 1).
ShiftDecomposition shift_decomposition(std::span<const Element> family, const Scheme& s,
                                       Index horizon);

struct WitnessWeights {
  Weights beta;
  /// Distinct indices n_k (k = 1, 2, ...) with alpha_{n_k} <= 2^-k; b = 1 there.
  std::vector<Index> unit_indices;
  Index levels = 0;         ///< number of dyadic levels k reached within the horizon
  double profile_sum = 0.0;  ///< sum_n b_n alpha_n^q, bounded by 3
};

/// Weight sequence with ||beta||_{l^q} = inf (evidenced by recurring unit
/// weights) under which every member of the profiled family has
/// sum_n b_n E(x, A_n)^q <= 3. Zero profile entries get weight 1. The profile
/// must not exceed 1, i.e. the family lies in the unit ball.
WitnessWeights witness_weights(const VectorXd& profile, double q);
WitnessWeights witness_weights(const ErrorProfile& profile, double q);

/// max |f(t) - f(s)| over node pairs with |t - s| <= delta.
double modulus_of_continuity(const Element& f, double delta);

struct EquicontinuityReport {
  VectorXd deltas;        ///< ascending
  VectorXd sup_modulus;   ///< sup over the family of w(f, delta)
  double uniform_bound = 0.0;      ///< max sup norm over the family
  double oscillation_bound = 0.0;  ///< 2 * uniform_bound, the largest possible modulus
  double fraction = 0.5;
  bool monotone = true;
  /// sup w(f, delta_min) <= fraction * oscillation_bound
  bool equicontinuous = true;
};

EquicontinuityReport equicontinuity_report(std::span<const Element> family, VectorXd deltas,
                                           double fraction = 0.5);

struct JacksonReport {
  std::vector<Index> degrees;
  VectorXd errors;
  VectorXd moduli;  ///< w(f, (b - a) / (n + 1))
  VectorXd ratios;
  double max_ratio = 0.0;
};

/// E(f, Pi_n) / w(f, (b - a)/(n + 1)) over n in [n_min, n_max].
JacksonReport jackson_ratio(const Element& f, const Scheme& s, Index n_min, Index n_max,
                            const MinimaxOptions& opts = {});

/// f = sum_k c_k e_k over the chain's orthonormal basis with
/// c_k = sqrt(eps_{k-1}^2 - eps_k^2), so that E(f, A_k) = eps_k (eps_d = 0).
Element lethargy_witness(const VectorXd& eps, const Scheme& chain);

struct ProjectionDefectReport {
  Index k = 0;
  double projection_norm = 0.0;
  double bound_factor = 0.0;  ///< 1 + |P_k|
  VectorXd residuals;         ///< |f - P_k f|
  VectorXd best_errors;       ///< E(f, A_k)
  double max_ratio = 0.0;     ///< max residual / E(f, A_k)
  double max_violation = 0.0;  ///< max (residual - bound_factor * E), <= tol when the inequality holds
  bool holds = true;
  double tol = 0.0;
};

/// Checks |f - P_k f| <= (1 + |P_k|) E(f, A_k) on each member.
ProjectionDefectReport projection_defect(std::span<const Element> family, const Scheme& s, Index k,
                                         double tol = 1e-10);

}  // namespace approxwidths
