#include "approxwidths/spaces.hpp"

#include <cmath>
#include <numbers>

namespace approxwidths {

Grid::Grid(VectorXd nodes) : nodes_(std::move(nodes)) {
  detail::require(nodes_.size() >= 2, "grid: at least two nodes are required");
  for (Index i = 0; i < nodes_.size(); ++i)
    detail::require(std::isfinite(nodes_(i)), "grid: nodes must be finite");
  for (Index i = 0; i + 1 < nodes_.size(); ++i)
    detail::require(nodes_(i) < nodes_(i + 1), "grid: nodes must be strictly increasing");

  const Index m = nodes_.size();
  weights_ = VectorXd::Zero(m);
  for (Index i = 0; i + 1 < m; ++i) {
    const double h = nodes_(i + 1) - nodes_(i);
    weights_(i) += 0.5 * h;
    weights_(i + 1) += 0.5 * h;
  }
}

Grid Grid::uniform(double a, double b, Index m) {
  detail::require(m >= 2 && a < b, "grid: need m >= 2 and a < b");
  VectorXd t = VectorXd::LinSpaced(m, a, b);
  t(0) = a;
  t(m - 1) = b;
  return Grid(std::move(t));
}

Grid Grid::chebyshev(double a, double b, Index m) {
  detail::require(m >= 2 && a < b, "grid: need m >= 2 and a < b");
  VectorXd t(m);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (Index j = 0; j < m; ++j)
    t(j) = mid - half * std::cos(std::numbers::pi * double(j) / double(m - 1));
  t(0) = a;
  t(m - 1) = b;
  // symmetric grids put the middle node exactly on the midpoint
  if (m % 2 == 1) t(m / 2) = mid;
  return Grid(std::move(t));
}

const char* to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::grid_sup: return "grid_sup";
    case SpaceKind::grid_lp: return "grid_lp";
    case SpaceKind::seq_lp: return "seq_lp";
  }
  return "?";
}

Element::Element(SpaceKind kind, GridPtr grid, VectorXd values, double p)
    : kind_(kind), grid_(std::move(grid)), values_(std::move(values)), p_(p) {
  detail::require(p_ >= 1.0, "element: norm exponent p must be >= 1");
  if (kind_ != SpaceKind::seq_lp) {
    detail::require(grid_ != nullptr, "element: grid kinds need a grid");
    detail::require(values_.size() == grid_->size(),
                    "element: payload length " + std::to_string(values_.size()) +
                        " does not match grid size " + std::to_string(grid_->size()));
  }
  for (Index i = 0; i < values_.size(); ++i)
    detail::require(std::isfinite(values_(i)), "element: payload entry " + std::to_string(i) +
                                                    " is not finite");
}

Element Element::grid_sup(GridPtr grid, VectorXd values) {
  return Element(SpaceKind::grid_sup, std::move(grid), std::move(values), kInf);
}

Element Element::grid_lp(GridPtr grid, VectorXd values, double p) {
  return Element(SpaceKind::grid_lp, std::move(grid), std::move(values), p);
}

Element Element::seq_lp(VectorXd values, double p) {
  return Element(SpaceKind::seq_lp, nullptr, std::move(values), p);
}

Element Element::with_values(VectorXd values) const {
  return Element(kind_, grid_, std::move(values), p_);
}

bool Element::same_space(const Element& other) const {
  if (kind_ != other.kind_ || p_ != other.p_ || size() != other.size()) return false;
  if (kind_ == SpaceKind::seq_lp) return true;
  return grid_ == other.grid_ || *grid_ == *other.grid_;
}

void require_same_space(const Element& x, const Element& y, const std::string& where) {
  if (!x.same_space(y))
    throw PreconditionError(where + ": elements belong to different spaces (" +
                            to_string(x.kind()) + " vs " + to_string(y.kind()) + ")");
}

double norm(const Element& x) {
  switch (x.kind()) {
    case SpaceKind::seq_lp:
      return detail::lp_norm(x.values(), x.p());
    case SpaceKind::grid_sup:
      return x.values().cwiseAbs().maxCoeff();
    case SpaceKind::grid_lp: {
      if (std::isinf(x.p())) return x.values().cwiseAbs().maxCoeff();
      const VectorXd& w = x.grid()->trapezoid_weights();
      const double integral = w.dot(x.values().cwiseAbs().array().pow(x.p()).matrix());
      return std::pow(integral, 1.0 / x.p());
    }
  }
  return 0.0;
}

double distance(const Element& x, const Element& y) {
  require_same_space(x, y, "distance");
  return norm(x.with_values(x.values() - y.values()));
}

Element operator+(const Element& x, const Element& y) {
  require_same_space(x, y, "element sum");
  return x.with_values(x.values() + y.values());
}

Element operator-(const Element& x, const Element& y) {
  require_same_space(x, y, "element difference");
  return x.with_values(x.values() - y.values());
}

Element operator-(const Element& x) { return x.with_values(-x.values()); }

Element operator*(double s, const Element& x) { return x.with_values(s * x.values()); }

Element absolutely_convex_combination(std::span<const Element> points, const VectorXd& lambda) {
  detail::require(!points.empty(), "absolutely_convex_combination: no points");
  detail::require(Index(points.size()) == lambda.size(),
                  "absolutely_convex_combination: coefficient count mismatch");
  const double budget = lambda.cwiseAbs().sum();
  if (budget > 1.0 + 1e-12)
    throw PreconditionError("absolutely_convex_combination: coefficient budget sum|lambda| = " +
                            std::to_string(budget) + " exceeds 1");
  VectorXd acc = VectorXd::Zero(points.front().size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    require_same_space(points.front(), points[i], "absolutely_convex_combination");
    acc += lambda(Index(i)) * points[i].values();
  }
  return points.front().with_values(std::move(acc));
}

MatrixXd stack_columns(std::span<const Element> family) {
  if (family.empty()) return MatrixXd();
  MatrixXd out(family.front().size(), Index(family.size()));
  for (std::size_t j = 0; j < family.size(); ++j) {
    require_same_space(family.front(), family[j], "stack_columns");
    out.col(Index(j)) = family[j].values();
  }
  return out;
}

}  // namespace approxwidths
