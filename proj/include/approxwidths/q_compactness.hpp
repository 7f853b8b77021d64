#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "approxwidths/compactness.hpp"
#include "approxwidths/schemes.hpp"
#include "approxwidths/subspace_width.hpp"

namespace approxwidths {

/// Q_n = all subspaces of R^d of dimension <= n (Euclidean norm).
struct AllSubspaces {
  Index dimension = 0;
};

/// Either a classical chain (Q_n = {A_n}) or all subspaces of bounded dimension.
/// Both kinds satisfy {0} = Q_0 ⊆ Q_1 ⊆ ..., scalar invariance and
/// Q_n + Q_m ⊆ Q_{n+m} structurally.
class GeneralizedScheme {
public:
  static GeneralizedScheme classical(Scheme s) { return GeneralizedScheme(std::move(s)); }
  static GeneralizedScheme all_subspaces(Index d);

  bool is_classical() const { return std::holds_alternative<Scheme>(kind_); }
  const Scheme& scheme() const;
  /// Ambient dimension of the underlying space.
  Index dimension() const;
  std::string describe() const;
  void require_compatible(const Element& x, const std::string& where) const;

private:
  explicit GeneralizedScheme(std::variant<Scheme, AllSubspaces> k) : kind_(std::move(k)) {}
  std::variant<Scheme, AllSubspaces> kind_;
};

struct WidthResult {
  Index n = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> value;  ///< set when the bounds agree within tolerance
  std::string optimizer;        ///< description of the achieving member of Q_n
  MatrixXd basis;               ///< achieving subspace for all_subspaces
  WidthMethod method = WidthMethod::exact_reduction;
  std::optional<double> sampled_lower;  ///< sphere-sample lower bound (operators only)
};

/// delta_n(D; Q) = inf { r : D ⊂ r U + A, A in Q_n }.
WidthResult gen_kolmogorov_number(std::span<const Element> D, const GeneralizedScheme& Q, Index n,
                                  const WidthOptions& opts = {});

struct QProfile {
  std::vector<WidthResult> widths;  ///< n = 0..N, bounds tightened by monotonicity
  bool raw_monotone = true;         ///< before tightening, upper bounds were non-increasing
  Verdict verdict = Verdict::inconclusive;
  double tol = 0.0;
};

/// "evidence-Q-compact", "evidence-non-Q-compact", "inconclusive".
const char* q_verdict_string(Verdict v);

/// delta_0..delta_N with the verdict: compact evidence when the trailing upper
/// bound is below tol, non-compact evidence when the trailing lower bound stays
/// at or above stall_ratio * delta_0.
QProfile q_profile(std::span<const Element> D, const GeneralizedScheme& Q, Index N, double tol,
                   const WidthOptions& opts = {}, double stall_ratio = 0.5);

struct OperatorOptions {
  Index sphere_samples = 2000;
  std::uint64_t seed = 0;
};

/// ||T|| from the Euclidean unit ball into the codomain of Q.
double operator_norm(const MatrixXd& T, const GeneralizedScheme& Q);

/// delta_n(T(U); Q) for T : (R^c, |.|_2) -> codomain of Q.
WidthResult operator_delta(const MatrixXd& T, const GeneralizedScheme& Q, Index n,
                           const OperatorOptions& opts = {});

struct UniformLimitReport {
  Index n = 0;
  double delta_T_lower = 0.0;
  VectorXd distances;     ///< ||T - T_m||
  VectorXd delta_upper;   ///< upper bounds on delta_n(T_m)
  VectorXd margins;       ///< ||T - T_m|| + delta_n(T_m) - delta_n(T)
  bool holds = true;
  double tol = 0.0;
};

UniformLimitReport uniform_limit_check(std::span<const MatrixXd> T_seq, const MatrixXd& T,
                                       const GeneralizedScheme& Q, Index n, double tol = 1e-9,
                                       const OperatorOptions& opts = {});

struct OrderC0Level {
  Index stage = 0;               ///< k >= 1
  Index n = 0;                   ///< n_k: index of the atoms' member A_{n_k}
  double threshold = 0.0;        ///< 2^-(k+1): stage error target on the unit-scaled set
  double atom_bound = 0.0;       ///< 3 * 2^-(k-2) * scale
  double residual_bound = 0.0;   ///< 4^-k * scale
  double max_atom_norm = 0.0;
  double max_residual = 0.0;           ///< certified residual 2^-k |r_k| (scaled)
  double max_reconstruction_error = 0.0;  ///< measured |d - sum_{j<=k} 2^-j b_j|
};

struct OrderC0Point {
  std::vector<Element> atoms;        ///< b_1..b_m (scaled back)
  VectorXd coefficients;             ///< lambda_k = 2^-k
  VectorXd residual_norms;           ///< certified residual per stage
  VectorXd reconstruction_errors;    ///< measured residual per stage
};

struct OrderC0Decomposition {
  double scale = 0.0;
  Index depth = 0;
  std::vector<OrderC0Level> levels;
  std::vector<OrderC0Point> points;
  double coefficient_sum = 0.0;  ///< sum_k |lambda_k| <= 1
  bool certified = true;         ///< every level bound holds
};

/// Runs the dyadic construction d = sum_k 2^-k b_k with b_k in A_{n_k}.
/// `scale` defaults to the largest norm in D. Throws PreconditionError if a
/// stage threshold is not reached within `horizon` (default: saturation).
OrderC0Decomposition order_c0_decompose(std::span<const Element> D, const Scheme& s, Index depth,
                                        std::optional<Index> horizon = std::nullopt,
                                        std::optional<double> scale = std::nullopt);

struct HullReport {
  Index n = 0;
  double vertex_value = 0.0;  ///< E(D, A_n), attained by a member
  Index attained_by = 0;
  double max_hull_value = 0.0;
  Index samples = 0;
  Index violations = 0;
  bool holds = true;
  double tol = 0.0;
};

/// Samples absolutely convex combinations of D and checks that none is farther
/// from A_n than E(D, A_n). Linear schemes only.
HullReport hull_invariance_check(std::span<const Element> D, const Scheme& s, Index n,
                                 Index samples = 1000, std::uint64_t seed = 0,
                                 std::optional<double> tol = std::nullopt);

struct BallMeasure {
  double estimate = 0.0;  ///< upper bound on delta_N
  double lower = 0.0;
  double delta0 = 0.0;
  double gap = 0.0;       ///< delta_{N-1} - delta_N (upper bounds)
  Index horizon = 0;
  Verdict verdict = Verdict::inconclusive;
};

/// gamma(D, Q) = lim delta_n, estimated by the trailing profile value.
BallMeasure ball_measure(std::span<const Element> D, const GeneralizedScheme& Q, Index N,
                         double tol = 1e-6, const WidthOptions& opts = {});

struct NetBoundRow {
  double epsilon = 0.0;
  Index centers = 0;
  Index N = 0;            ///< largest index needed by a center
  Index K = 0;            ///< index with span of the net approximants inside A_K
  double delta = 0.0;     ///< delta_K(D; Q) = E(D, A_K)
  double e_tilde = 0.0;   ///< E(D, Ã_K)
  double e_span = 0.0;    ///< E(D, B_N) (upper bound unless exact)
  bool span_exact = true;
  bool holds = true;
};

struct NetBoundReport {
  std::vector<NetBoundRow> rows;
  bool holds = true;
  double tol = 0.0;
};

/// For each epsilon: an epsilon-net of D, near-best approximants of the centers
/// within epsilon, and the chain delta_K(D) <= E(D, Ã_K) <= E(D, span).
NetBoundReport compact_implies_qcompact_check(std::span<const Element> D,
                                              const GeneralizedScheme& Q,
                                              const std::vector<double>& eps_schedule,
                                              Index horizon,
                                              std::optional<double> tol = std::nullopt);

}  // namespace approxwidths
