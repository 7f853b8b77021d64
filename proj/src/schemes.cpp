#include "approxwidths/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace approxwidths {

const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::poly_sup: return "poly_sup";
    case SchemeKind::trig_l2: return "trig_l2";
    case SchemeKind::nterm_lp: return "nterm_lp";
    case SchemeKind::subspace_chain: return "subspace_chain";
  }
  return "?";
}

namespace {

// Orthonormalize the columns of `b` in order, with a positive diagonal in R.
// Returns the number of leading columns that are numerically independent.
Index orthonormalize(const MatrixXd& b, MatrixXd& q, double rel_tol) {
  const Index rows = b.rows(), cols = b.cols();
  Eigen::HouseholderQR<MatrixXd> qr(b);
  q = qr.householderQ() * MatrixXd::Identity(rows, cols);
  const MatrixXd& r = qr.matrixQR();
  double rmax = 0.0;
  for (Index j = 0; j < cols; ++j) rmax = std::max(rmax, std::abs(r(j, j)));
  Index good = cols;
  for (Index j = 0; j < cols; ++j) {
    if (std::abs(r(j, j)) <= rel_tol * rmax || rmax == 0.0) {
      good = j;
      break;
    }
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return good;
}

MatrixXd trig_basis(const Grid& g, Index degree) {
  const double omega = 2.0 * std::numbers::pi / (g.b() - g.a());
  MatrixXd B(g.size(), 2 * degree + 1);
  for (Index i = 0; i < g.size(); ++i) {
    const double t = g.node(i) - g.a();
    B(i, 0) = 1.0;
    for (Index j = 1; j <= degree; ++j) {
      B(i, 2 * j - 1) = std::cos(double(j) * omega * t);
      B(i, 2 * j) = std::sin(double(j) * omega * t);
    }
  }
  return B;
}

}  // namespace

Scheme Scheme::poly_sup(GridPtr grid) {
  detail::require(grid != nullptr, "poly_sup: grid required");
  auto d = std::make_shared<Data>();
  d->kind = SchemeKind::poly_sup;
  d->p = kInf;
  d->ambient = grid->size();
  d->saturation = grid->size() - 1;
  d->grid = std::move(grid);
  return Scheme(std::move(d));
}

Scheme Scheme::trig_l2(GridPtr grid) {
  detail::require(grid != nullptr, "trig_l2: grid required");
  detail::require(grid->size() >= 3, "trig_l2: at least three nodes are required");
  auto d = std::make_shared<Data>();
  d->kind = SchemeKind::trig_l2;
  d->p = 2.0;
  d->ambient = grid->size();
  d->sqrt_w = grid->trapezoid_weights().cwiseSqrt();
  // both endpoints carry the same periodic sample, so at most m-1 independent
  // trigonometric columns exist
  Index degree = (grid->size() - 2) / 2;
  const MatrixXd B = d->sqrt_w.asDiagonal() * trig_basis(*grid, degree);
  MatrixXd q;
  const Index good = orthonormalize(B, q, 1e-10);
  degree = std::min(degree, (good - 1) / 2);
  d->q = q.leftCols(2 * degree + 1);
  d->saturation = degree;
  d->grid = std::move(grid);
  return Scheme(std::move(d));
}

Scheme Scheme::nterm_lp(double p, Index dimension) {
  detail::require(p >= 1.0, "nterm_lp: p must be >= 1");
  detail::require(dimension >= 1, "nterm_lp: dimension must be >= 1");
  auto d = std::make_shared<Data>();
  d->kind = SchemeKind::nterm_lp;
  d->p = p;
  d->ambient = dimension;
  d->saturation = dimension;
  return Scheme(std::move(d));
}

Scheme Scheme::subspace_chain(const MatrixXd& basis) {
  detail::require(basis.rows() >= 1 && basis.cols() >= 1, "subspace_chain: empty basis");
  detail::require(basis.cols() <= basis.rows(),
                  "subspace_chain: more basis columns than the ambient dimension");
  detail::require(basis.allFinite(), "subspace_chain: basis entries must be finite");
  auto d = std::make_shared<Data>();
  d->kind = SchemeKind::subspace_chain;
  d->p = 2.0;
  d->ambient = basis.rows();
  d->sqrt_w = VectorXd::Ones(basis.rows());
  const Index good = orthonormalize(basis, d->q, 1e-12);
  if (good < basis.cols())
    throw PreconditionError("subspace_chain: basis is rank deficient (column " +
                            std::to_string(good) + " depends on earlier columns)");
  d->saturation = basis.cols();
  return Scheme(std::move(d));
}

SpaceKind Scheme::space_kind() const {
  switch (kind()) {
    case SchemeKind::poly_sup: return SpaceKind::grid_sup;
    case SchemeKind::trig_l2: return SpaceKind::grid_lp;
    default: return SpaceKind::seq_lp;
  }
}

Index Scheme::dimension(Index n) const {
  detail::require(n >= 0, "scheme: index must be >= 0");
  const Index e = effective_index(n);
  switch (kind()) {
    case SchemeKind::poly_sup: return e == 0 ? 0 : e + 1;
    case SchemeKind::trig_l2: return e == 0 ? 0 : 2 * e + 1;
    default: return e;
  }
}

bool Scheme::accepts(const Element& x) const {
  if (x.kind() != space_kind() || x.size() != ambient_dimension()) return false;
  switch (kind()) {
    case SchemeKind::poly_sup:
      return *x.grid() == *grid();
    case SchemeKind::trig_l2:
      return x.p() == 2.0 && *x.grid() == *grid();
    case SchemeKind::nterm_lp:
      return x.p() == space_p();
    case SchemeKind::subspace_chain:
      return x.p() == 2.0;
  }
  return false;
}

void Scheme::require_compatible(const Element& x, const std::string& where) const {
  if (!accepts(x))
    throw PreconditionError(where + ": element (" + to_string(x.kind()) + ", size " +
                            std::to_string(x.size()) + ") is not in the space of scheme " +
                            describe());
}

Element Scheme::make_element(VectorXd values) const {
  switch (kind()) {
    case SchemeKind::poly_sup: return Element::grid_sup(grid(), std::move(values));
    case SchemeKind::trig_l2: return Element::grid_lp(grid(), std::move(values), 2.0);
    default: return Element::seq_lp(std::move(values), space_p());
  }
}

std::string Scheme::describe() const {
  std::ostringstream os;
  os << to_string(kind());
  switch (kind()) {
    case SchemeKind::poly_sup:
    case SchemeKind::trig_l2:
      os << "[" << grid()->a() << "," << grid()->b() << "; " << grid()->size() << " nodes]";
      break;
    case SchemeKind::nterm_lp:
      os << "[p=" << space_p() << ", d=" << ambient_dimension() << "]";
      break;
    case SchemeKind::subspace_chain:
      os << "[d=" << ambient_dimension() << ", r=" << saturation_index() << "]";
      break;
  }
  return os.str();
}

double default_tolerance(const Scheme& s) {
  return s.kind() == SchemeKind::poly_sup ? 1e-6 : 1e-8;
}

namespace {

BestApprox project_best(const Element& x, const Scheme& s, Index n) {
  const Index cols = s.dimension(n);
  const VectorXd& sw = s.sqrt_weights();
  const VectorXd y = sw.cwiseProduct(x.values());
  const auto Qk = s.orthonormal_basis().leftCols(cols);
  const VectorXd py = Qk * (Qk.transpose() * y);
  const VectorXd ry = y - py;
  OrthogonalityCertificate cert;
  if (cols > 0) cert.residual_inner_product_max = (Qk.transpose() * ry).cwiseAbs().maxCoeff();
  const double err = ry.norm();
  return BestApprox{.error = err,
                    .approximant = x.with_values(py.cwiseQuotient(sw)),
                    .n = n,
                    .effective_n = s.effective_index(n),
                    .certificate = cert,
                    .near_best = false,
                    .defect = 0.0,
                    .lower_bound = err};
}

BestApprox nterm_best(const Element& x, const Scheme& s, Index n) {
  const Index d = x.size();
  const Index keep = std::min(n, d);
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index(0));
  const VectorXd& v = x.values();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return std::abs(v(i)) > std::abs(v(j)); });
  SupportCertificate cert;
  VectorXd approx = VectorXd::Zero(d);
  for (Index i = 0; i < keep; ++i) {
    const Index idx = order[std::size_t(i)];
    approx(idx) = v(idx);
    cert.support.push_back(idx);
  }
  std::sort(cert.support.begin(), cert.support.end());
  const double err = detail::lp_norm(v - approx, x.p());
  return BestApprox{.error = err,
                    .approximant = x.with_values(std::move(approx)),
                    .n = n,
                    .effective_n = s.effective_index(n),
                    .certificate = cert,
                    .near_best = false,
                    .defect = 0.0,
                    .lower_bound = err};
}

BestApprox poly_best(const Element& x, const Scheme& s, Index n, const MinimaxOptions& opts) {
  const Index deg = s.effective_index(n);
  const MinimaxResult mm = discrete_minimax(*s.grid(), x.values(), deg, opts);
  AlternationCertificate cert;
  cert.nodes = mm.reference;
  cert.signed_errors = mm.reference_errors;
  cert.levelled_error = mm.levelled_error;
  cert.max_error = mm.error;
  cert.alternates = true;
  for (Index i = 0; i + 1 < mm.reference_errors.size(); ++i)
    if (std::signbit(mm.reference_errors(i)) == std::signbit(mm.reference_errors(i + 1)))
      cert.alternates = false;
  return BestApprox{.error = mm.error,
                    .approximant = x.with_values(mm.approximant),
                    .n = n,
                    .effective_n = deg,
                    .certificate = cert,
                    .near_best = !mm.converged,
                    .defect = mm.defect(),
                    .lower_bound = mm.levelled_error};
}

}  // namespace

BestApprox best_error(const Element& x, const Scheme& s, Index n, const MinimaxOptions& opts) {
  detail::require(n >= 0, "best_error: n must be >= 0");
  s.require_compatible(x, "best_error");
  if (n == 0) {
    const double nx = norm(x);
    return BestApprox{.error = nx,
                      .approximant = x.zero_like(),
                      .n = 0,
                      .effective_n = 0,
                      .certificate = std::monostate{},
                      .near_best = false,
                      .defect = 0.0,
                      .lower_bound = nx};
  }
  switch (s.kind()) {
    case SchemeKind::poly_sup: return poly_best(x, s, n, opts);
    case SchemeKind::nterm_lp: return nterm_best(x, s, n);
    default: return project_best(x, s, n);
  }
}

Element apply_projection(const Element& x, const Scheme& s, Index k) {
  if (!s.has_projections())
    throw PreconditionError(std::string("apply_projection: scheme ") + to_string(s.kind()) +
                            " has no linear projections");
  detail::require(k >= 0, "apply_projection: k must be >= 0");
  s.require_compatible(x, "apply_projection");
  return project_best(x, s, k).approximant;
}

double projection_bound(const Scheme& s, Index k, std::uint64_t seed) {
  if (!s.has_projections())
    throw PreconditionError(std::string("projection_bound: scheme ") + to_string(s.kind()) +
                            " has no linear projections");
  detail::require(k >= 0, "projection_bound: k must be >= 0");
  const Index cols = s.dimension(k);
  if (cols == 0) return 0.0;
  // The norm is Euclidean in the weighted coordinates, where P_k = Q_k Q_k^T.
  const auto Qk = s.orthonormal_basis().leftCols(cols);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  VectorXd v(s.ambient_dimension());
  for (Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < 50; ++it) {
    VectorXd w = Qk * (Qk.transpose() * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double prev = estimate;
    estimate = nw;
    v = w / nw;
    if (it > 0 && std::abs(estimate - prev) <= 1e-15 * estimate) break;
  }
  return estimate;
}

namespace {

Element random_member(const Scheme& s, Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const Index d = s.ambient_dimension();
  const Index dim = s.dimension(n);
  switch (s.kind()) {
    case SchemeKind::poly_sup: {
      const MatrixXd V = chebyshev_vandermonde(*s.grid(), s.effective_index(n));
      VectorXd c(V.cols());
      for (Index i = 0; i < c.size(); ++i) c(i) = gauss(rng);
      return s.make_element(V * c);
    }
    case SchemeKind::nterm_lp: {
      std::vector<Index> idx(static_cast<std::size_t>(d));
      std::iota(idx.begin(), idx.end(), Index(0));
      std::shuffle(idx.begin(), idx.end(), rng);
      VectorXd v = VectorXd::Zero(d);
      for (Index i = 0; i < dim; ++i) v(idx[std::size_t(i)]) = gauss(rng);
      return s.make_element(std::move(v));
    }
    default: {
      VectorXd c(dim);
      for (Index i = 0; i < dim; ++i) c(i) = gauss(rng);
      const VectorXd y = s.orthonormal_basis().leftCols(dim) * c;
      return s.make_element(y.cwiseQuotient(s.sqrt_weights()));
    }
  }
}

void record(AxiomCheck& check, double rel, double tol, const std::string& where) {
  if (rel > check.worst) {
    check.worst = rel;
    check.witness = where;
  }
  if (rel > tol) check.pass = false;
}

}  // namespace

AxiomReport verify_axioms(const Scheme& s, std::span<const Element> samples, Index horizon,
                          const AxiomOptions& opts) {
  detail::require(!samples.empty(), "verify_axioms: samples must be nonempty");
  detail::require(horizon >= 1, "verify_axioms: horizon must be >= 1");
  AxiomReport rep;
  rep.horizon = horizon;
  rep.membership_tol = default_tolerance(s);
  rep.density_tol = opts.density_tol;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> scalar(-10.0, 10.0);

  const Index top = std::min(horizon, s.saturation_index());
  for (Index n = 1; n <= top; ++n) {
    for (int t = 0; t < opts.trials; ++t) {
      const Element a = random_member(s, n, rng);
      const Element b = random_member(s, n, rng);
      const Element sum = a + b;
      const double scale = std::max(1.0, norm(sum));
      const double e_sum = best_error(sum, s, s.K(n)).error / scale;
      record(rep.sum_closure, e_sum, rep.membership_tol,
             "n=" + std::to_string(n) + " trial=" + std::to_string(t));

      const double lambda = scalar(rng);
      const Element scaled = lambda * a;
      const double e_scaled = best_error(scaled, s, n).error / std::max(1.0, norm(scaled));
      record(rep.scaling, e_scaled, rep.membership_tol,
             "n=" + std::to_string(n) + " lambda=" + std::to_string(lambda));
    }
  }

  rep.density_profile = VectorXd::Zero(horizon + 1);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Element& x = samples[i];
    const double nx = norm(x);
    if (nx == 0.0) continue;
    for (Index n = 0; n <= horizon; ++n)
      rep.density_profile(n) = std::max(rep.density_profile(n), best_error(x, s, n).error / nx);
  }
  const double tail = rep.density_profile(horizon);
  rep.density.worst = tail;
  rep.density.pass = tail <= opts.density_tol;
  rep.density.witness = "relative error at n=" + std::to_string(horizon);
  return rep;
}

}  // namespace approxwidths
