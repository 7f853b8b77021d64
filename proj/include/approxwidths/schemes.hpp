#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "approxwidths/minimax.hpp"
#include "approxwidths/spaces.hpp"

namespace approxwidths {

enum class SchemeKind { poly_sup, trig_l2, nterm_lp, subspace_chain };

const char* to_string(SchemeKind k);

/// A catalog approximation scheme A_0 = {0} ⊂ A_1 ⊂ ... on a discretized space.
///
///  - poly_sup: A_n = polynomials of degree <= n (n >= 1) on a grid, sup norm.
///  - trig_l2: A_n = trigonometric polynomials of degree <= n (n >= 1), period
///    b - a, on a grid under the trapezoid L^2 norm.
///  - nterm_lp: A_n = vectors with at most n non-zero entries, l^p norm.
///  - subspace_chain: A_n = span of the first n columns of a basis, l^2 norm.
///
/// On a finite grid every chain eventually saturates; indices past
/// `saturation_index()` reuse the last distinct member.
class Scheme {
public:
  static Scheme poly_sup(GridPtr grid);
  static Scheme trig_l2(GridPtr grid);
  static Scheme nterm_lp(double p, Index dimension);
  /// Columns of `basis` span the chain; they are orthonormalized in order
  /// (Gram-Schmidt sign convention, so an orthonormal basis is kept as is).
  /// Throws PreconditionError for a rank-deficient basis.
  static Scheme subspace_chain(const MatrixXd& basis);

  SchemeKind kind() const { return data_->kind; }
  SpaceKind space_kind() const;
  double space_p() const { return data_->p; }
  const GridPtr& grid() const { return data_->grid; }
  Index ambient_dimension() const { return data_->ambient; }

  /// Index map with A_n + A_n ⊆ A_{K(n)}.
  Index K(Index n) const { return kind() == SchemeKind::nterm_lp ? 2 * n : n; }
  bool is_linear() const { return kind() != SchemeKind::nterm_lp; }
  bool has_projections() const {
    return kind() == SchemeKind::trig_l2 || kind() == SchemeKind::subspace_chain;
  }

  Index saturation_index() const { return data_->saturation; }
  Index effective_index(Index n) const { return std::min(n, data_->saturation); }
  /// Dimension of A_n (the sparsity level for nterm_lp).
  Index dimension(Index n) const;

  bool accepts(const Element& x) const;
  void require_compatible(const Element& x, const std::string& where) const;
  Element make_element(VectorXd values) const;

  /// Columns orthonormal in the weighted coordinates y = sqrt(w) .* x
  /// (trig_l2, subspace_chain only).
  const MatrixXd& orthonormal_basis() const { return data_->q; }
  /// sqrt of the quadrature weights (all ones for subspace_chain).
  const VectorXd& sqrt_weights() const { return data_->sqrt_w; }

  /// Short human-readable description used in reports.
  std::string describe() const;

private:
  struct Data {
    SchemeKind kind;
    GridPtr grid;
    double p = 2.0;
    Index ambient = 0;
    Index saturation = 0;
    MatrixXd q;
    VectorXd sqrt_w;
  };
  explicit Scheme(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

struct AlternationCertificate {
  std::vector<Index> nodes;  ///< grid indices
  VectorXd signed_errors;
  double levelled_error = 0.0;
  double max_error = 0.0;
  bool alternates = false;
};

struct OrthogonalityCertificate {
  /// max_j |<x - Px, phi_j>| over the orthonormal basis of A_n
  double residual_inner_product_max = 0.0;
};

struct SupportCertificate {
  std::vector<Index> support;
};

using Certificate = std::variant<std::monostate, AlternationCertificate,
                                 OrthogonalityCertificate, SupportCertificate>;

struct BestApprox {
  double error = 0.0;
  Element approximant;
  Index n = 0;
  Index effective_n = 0;  ///< n clamped at the saturation index
  Certificate certificate;
  /// Set when the exchange solver stopped short of equioscillation; `error` is
  /// still the true distance to the returned approximant.
  bool near_best = false;
  double defect = 0.0;
  /// Certified lower bound on E(x, A_n) (equal to `error` for exact solvers).
  double lower_bound = 0.0;
};

/// E(x, A_n) with an approximant and solver certificate.
BestApprox best_error(const Element& x, const Scheme& s, Index n, const MinimaxOptions& opts = {});

/// P_k x for the schemes with linear projections (trig_l2, subspace_chain).
Element apply_projection(const Element& x, const Scheme& s, Index k);

/// Operator norm of P_k on the discretized space, estimated by power iteration.
double projection_bound(const Scheme& s, Index k, std::uint64_t seed = 0);

struct AxiomCheck {
  bool pass = true;
  double worst = 0.0;   ///< worst residual seen (relative)
  std::string witness;  ///< where the worst case occurred
};

struct AxiomReport {
  AxiomCheck sum_closure;     ///< A_n + A_n ⊆ A_{K(n)}
  AxiomCheck scaling;         ///< lambda A_n ⊆ A_n
  AxiomCheck density;         ///< E(x, A_n) -> 0 across the samples
  VectorXd density_profile;   ///< max over samples of E(x, A_n) / |x|
  Index horizon = 0;
  double membership_tol = 0.0;
  double density_tol = 0.0;
};

struct AxiomOptions {
  std::uint64_t seed = 0;
  int trials = 8;
  double density_tol = 1e-6;
};

/// Finite-scale evidence for the scheme axioms. Closure properties are tested
/// on random members; density can only be evidenced by the decay of the
/// samples' error profiles up to the horizon.
AxiomReport verify_axioms(const Scheme& s, std::span<const Element> samples, Index horizon,
                          const AxiomOptions& opts = {});

/// Default membership/solver tolerance for a scheme: 1e-6 for the exchange
/// solver, 1e-8 for the exact solvers.
double default_tolerance(const Scheme& s);

}  // namespace approxwidths
