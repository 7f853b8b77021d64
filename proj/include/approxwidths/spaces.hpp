#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "approxwidths/error.hpp"

namespace approxwidths {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Strictly increasing nodes on [a, b], first node a and last node b.
class Grid {
public:
  explicit Grid(VectorXd nodes);

  static Grid uniform(double a, double b, Index m);
  /// Chebyshev extrema mapped to [a, b], listed in increasing order.
  static Grid chebyshev(double a, double b, Index m);

  double a() const { return nodes_(0); }
  double b() const { return nodes_(nodes_.size() - 1); }
  Index size() const { return nodes_.size(); }
  const VectorXd& nodes() const { return nodes_; }
  double node(Index i) const { return nodes_(i); }

  /// Composite-trapezoid weights: integral of g ~ sum_i w_i g(t_i).
  const VectorXd& trapezoid_weights() const { return weights_; }

  friend bool operator==(const Grid& l, const Grid& r) { return l.nodes_ == r.nodes_; }

private:
  VectorXd nodes_;
  VectorXd weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(Grid g) { return std::make_shared<const Grid>(std::move(g)); }

enum class SpaceKind { grid_sup, grid_lp, seq_lp };

const char* to_string(SpaceKind k);

/// A point of a discretized normed space: a grid function under the sup norm
/// or a trapezoid L^p norm, or a finite sequence under an l^p norm.
/// Immutable; the grid is shared between elements of the same space.
class Element {
public:
  static Element grid_sup(GridPtr grid, VectorXd values);
  static Element grid_lp(GridPtr grid, VectorXd values, double p);
  static Element seq_lp(VectorXd values, double p);

  SpaceKind kind() const { return kind_; }
  const VectorXd& values() const { return values_; }
  Index size() const { return values_.size(); }
  /// Norm exponent; inf for grid_sup.
  double p() const { return p_; }
  const GridPtr& grid() const { return grid_; }

  /// Element of the same space carrying `values`.
  Element with_values(VectorXd values) const;
  Element zero_like() const { return with_values(VectorXd::Zero(size())); }

  bool same_space(const Element& other) const;

private:
  Element(SpaceKind kind, GridPtr grid, VectorXd values, double p);

  SpaceKind kind_;
  GridPtr grid_;
  VectorXd values_;
  double p_;
};

double norm(const Element& x);
double distance(const Element& x, const Element& y);

/// Throws PreconditionError unless x and y live in the same space.
void require_same_space(const Element& x, const Element& y, const std::string& where);

Element operator+(const Element& x, const Element& y);
Element operator-(const Element& x, const Element& y);
Element operator-(const Element& x);
Element operator*(double s, const Element& x);

/// sum_i lambda_i x_i, requiring sum_i |lambda_i| <= 1.
Element absolutely_convex_combination(std::span<const Element> points, const VectorXd& lambda);

/// Column matrix of the payloads of a family of same-space elements.
MatrixXd stack_columns(std::span<const Element> family);

namespace detail {

/// l^p norm of a dense vector, p in [1, inf].
template <typename Derived>
double lp_norm(const Eigen::MatrixBase<Derived>& v, double p) {
  if (v.size() == 0) return 0.0;
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  return std::pow(v.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

}  // namespace detail

}  // namespace approxwidths
