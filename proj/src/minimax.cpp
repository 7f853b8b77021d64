#include "approxwidths/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace approxwidths {

namespace {

std::vector<Index> initial_reference(const Grid& grid, Index count) {
  const Index m = grid.size();
  const double a = grid.a(), b = grid.b();
  std::vector<Index> ref;
  ref.reserve(std::size_t(count));
  const VectorXd& t = grid.nodes();
  Index lo = 0;
  for (Index j = 0; j < count; ++j) {
    const double s = -std::cos(std::numbers::pi * double(j) / double(count - 1));
    const double target = 0.5 * (a + b) + 0.5 * (b - a) * s;
    auto it = std::lower_bound(t.data() + lo, t.data() + m, target);
    Index idx = Index(it - t.data());
    if (idx > lo && (idx == m || target - t(idx - 1) < t(idx) - target)) --idx;
    // leave room for the remaining nodes
    idx = std::clamp(idx, lo, m - (count - j));
    ref.push_back(idx);
    lo = idx + 1;
  }
  return ref;
}

struct Iterate {
  VectorXd coefficients;
  VectorXd error;
  double levelled = 0.0;
  double max_error = kInf;
  Index argmax = 0;
  std::vector<Index> reference;
};

bool solve_reference(const MatrixXd& V, const VectorXd& f, const std::vector<Index>& ref,
                     Iterate& out) {
  const Index n1 = V.cols();
  const Index k = Index(ref.size());
  MatrixXd A(k, n1 + 1);
  VectorXd rhs(k);
  for (Index i = 0; i < k; ++i) {
    A.row(i).head(n1) = V.row(ref[std::size_t(i)]);
    A(i, n1) = (i % 2 == 0) ? 1.0 : -1.0;
    rhs(i) = f(ref[std::size_t(i)]);
  }
  const VectorXd sol = A.partialPivLu().solve(rhs);
  if (!sol.allFinite()) return false;
  out.coefficients = sol.head(n1);
  out.levelled = std::abs(sol(n1));
  out.error = f - V * out.coefficients;
  out.max_error = out.error.cwiseAbs().maxCoeff(&out.argmax);
  out.reference = ref;
  return true;
}

// Multi-point exchange: keep the alternating sign-run extrema whose error is at
// least the current levelled error, then take n+2 consecutive ones around the
// global maximum. Every kept point has |e| >= |h|, so the next levelled error
// cannot decrease.
std::vector<Index> exchange(const Iterate& it, Index count) {
  const VectorXd& e = it.error;
  const double threshold = it.levelled * (1.0 - 1e-12);
  std::vector<Index> runs;
  for (Index i = 0; i < e.size(); ++i) {
    const double mag = std::abs(e(i));
    if (mag == 0.0 || mag < threshold) continue;
    if (!runs.empty() && std::signbit(e(runs.back())) == std::signbit(e(i))) {
      if (mag > std::abs(e(runs.back()))) runs.back() = i;
    } else {
      runs.push_back(i);
    }
  }
  const Index total = Index(runs.size());
  if (total < count) return {};
  const Index pos = Index(std::find(runs.begin(), runs.end(), it.argmax) - runs.begin());
  if (pos == total) return {};

  Index best_start = -1;
  double best_min = -1.0;
  for (Index start = std::max<Index>(0, pos - count + 1); start <= std::min(pos, total - count);
       ++start) {
    double mn = kInf;
    for (Index j = start; j < start + count; ++j) mn = std::min(mn, std::abs(e(runs[std::size_t(j)])));
    if (mn > best_min) {
      best_min = mn;
      best_start = start;
    }
  }
  return {runs.begin() + best_start, runs.begin() + best_start + count};
}

// Stiefel's single-point exchange: swap the global maximum into the reference
// so that signs keep alternating.
std::vector<Index> single_exchange(const Iterate& it) {
  std::vector<Index> ref = it.reference;
  const VectorXd& e = it.error;
  const Index star = it.argmax;
  const auto sgn = [&](Index i) { return std::signbit(e(i)); };
  auto upper = std::upper_bound(ref.begin(), ref.end(), star);
  if (upper != ref.end() && upper != ref.begin() && *(upper - 1) == star) return ref;
  if (upper == ref.begin()) {
    if (sgn(ref.front()) == sgn(star)) {
      ref.front() = star;
    } else {
      ref.insert(ref.begin(), star);
      ref.pop_back();
    }
  } else if (upper == ref.end()) {
    if (sgn(ref.back()) == sgn(star)) {
      ref.back() = star;
    } else {
      ref.push_back(star);
      ref.erase(ref.begin());
    }
  } else {
    // star lies between two reference nodes of opposite sign; replace the one
    // sharing its sign
    auto left = upper - 1;
    if (sgn(*left) == sgn(star)) *left = star;
    else *upper = star;
  }
  return ref;
}

}  // namespace

MatrixXd chebyshev_vandermonde(const Grid& grid, Index degree) {
  const Index m = grid.size();
  MatrixXd V(m, degree + 1);
  const double mid = 0.5 * (grid.a() + grid.b()), half = 0.5 * (grid.b() - grid.a());
  for (Index i = 0; i < m; ++i) {
    const double s = std::clamp((grid.node(i) - mid) / half, -1.0, 1.0);
    V(i, 0) = 1.0;
    if (degree >= 1) V(i, 1) = s;
    for (Index j = 2; j <= degree; ++j) V(i, j) = 2.0 * s * V(i, j - 1) - V(i, j - 2);
  }
  return V;
}

MinimaxResult discrete_minimax(const Grid& grid, const VectorXd& f, Index degree,
                               const MinimaxOptions& options) {
  detail::require(degree >= 0, "discrete_minimax: degree must be >= 0");
  detail::require(f.size() == grid.size(), "discrete_minimax: values do not match grid");
  const Index m = grid.size();
  MinimaxResult res;

  if (degree + 1 >= m) {
    // interpolation through every node
    const MatrixXd V = chebyshev_vandermonde(grid, m - 1);
    res.coefficients = V.partialPivLu().solve(f);
    res.approximant = f;
    res.reference_errors = VectorXd();
    res.converged = true;
    return res;
  }

  const MatrixXd V = chebyshev_vandermonde(grid, degree);
  const Index count = degree + 2;
  const double fscale = std::max(1.0, f.cwiseAbs().maxCoeff());

  Iterate best;
  Iterate cur;
  std::vector<Index> ref = initial_reference(grid, count);
  bool use_single = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (!solve_reference(V, f, ref, cur)) break;
    if (cur.max_error < best.max_error) best = cur;
    const double defect = cur.max_error - cur.levelled;
    if (defect <= 1e-14 * fscale) {
      res.converged = true;
      ++iter;
      break;
    }
    std::vector<Index> next = use_single ? std::vector<Index>{} : exchange(cur, count);
    if (next.empty()) {
      use_single = true;
      next = single_exchange(cur);
    }
    if (next == ref) {
      if (use_single) break;
      use_single = true;
      next = single_exchange(cur);
      if (next == ref) break;
    }
    ref = std::move(next);
  }

  if (best.coefficients.size() == 0)
    throw SolverError("discrete_minimax: reference system is singular");

  res.coefficients = best.coefficients;
  res.approximant = V * best.coefficients;
  res.error = best.max_error;
  res.levelled_error = best.levelled;
  res.reference = best.reference;
  res.reference_errors.resize(count);
  for (Index i = 0; i < count; ++i) res.reference_errors(i) = best.error(best.reference[std::size_t(i)]);
  res.iterations = iter;
  res.converged = res.converged || res.defect() <= options.tolerance * fscale;
  return res;
}

}  // namespace approxwidths
