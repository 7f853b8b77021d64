#include "approxwidths/q_compactness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace approxwidths {

GeneralizedScheme GeneralizedScheme::all_subspaces(Index d) {
  detail::require(d >= 1, "all_subspaces: dimension must be >= 1");
  return GeneralizedScheme(AllSubspaces{d});
}

const Scheme& GeneralizedScheme::scheme() const {
  if (!is_classical()) throw PreconditionError("generalized scheme: not a classical chain");
  return std::get<Scheme>(kind_);
}

Index GeneralizedScheme::dimension() const {
  if (is_classical()) return scheme().ambient_dimension();
  return std::get<AllSubspaces>(kind_).dimension;
}

std::string GeneralizedScheme::describe() const {
  if (is_classical()) return "classical " + scheme().describe();
  return "all_subspaces[d=" + std::to_string(dimension()) + "]";
}

void GeneralizedScheme::require_compatible(const Element& x, const std::string& where) const {
  if (is_classical()) {
    scheme().require_compatible(x, where);
    return;
  }
  if (x.kind() != SpaceKind::seq_lp || x.p() != 2.0 || x.size() != dimension())
    throw PreconditionError(where + ": all_subspaces needs l^2 vectors of length " +
                            std::to_string(dimension()));
}

const char* q_verdict_string(Verdict v) {
  switch (v) {
    case Verdict::evidence_compact: return "evidence-Q-compact";
    case Verdict::evidence_noncompact: return "evidence-non-Q-compact";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

void settle_value(WidthResult& r, double rel_tol) {
  if (r.lower > r.upper) r.lower = r.upper;
  if (r.upper - r.lower <= rel_tol * std::max(1.0, r.upper)) r.value = r.upper;
  else r.value.reset();
}

std::string basis_description(const MatrixXd& B) {
  std::ostringstream os;
  os << "span of " << B.cols() << " orthonormal vector" << (B.cols() == 1 ? "" : "s");
  return os.str();
}

}  // namespace

WidthResult gen_kolmogorov_number(std::span<const Element> D, const GeneralizedScheme& Q, Index n,
                                  const WidthOptions& opts) {
  detail::require(!D.empty(), "gen_kolmogorov_number: D must be nonempty");
  detail::require(n >= 0, "gen_kolmogorov_number: n must be >= 0");
  for (const Element& x : D) {
    Q.require_compatible(x, "gen_kolmogorov_number");
    detail::require(x.values().allFinite(), "gen_kolmogorov_number: D must be bounded");
  }

  WidthResult r;
  r.n = n;
  if (Q.is_classical()) {
    const Scheme& s = Q.scheme();
    Index arg = 0;
    for (std::size_t i = 0; i < D.size(); ++i) {
      const BestApprox ba = best_error(D[i], s, n);
      if (i == 0 || ba.error > r.upper) {
        r.upper = ba.error;
        arg = Index(i);
      }
      r.lower = std::max(r.lower, ba.lower_bound);
    }
    r.method = WidthMethod::exact_reduction;
    r.optimizer = "A_" + std::to_string(n) + " (member " + std::to_string(arg) + " attains)";
    settle_value(r, 1e-9);
    return r;
  }

  const MatrixXd X = stack_columns(D);
  const SubspaceWidth w = kolmogorov_width(X, n, opts);
  r.lower = w.lower;
  r.upper = w.upper;
  r.basis = w.basis;
  r.method = w.method;
  r.optimizer = basis_description(w.basis);
  settle_value(r, std::max(opts.value_tol, 1e-12));
  return r;
}

QProfile q_profile(std::span<const Element> D, const GeneralizedScheme& Q, Index N, double tol,
                   const WidthOptions& opts, double stall_ratio) {
  detail::require(N >= 0, "q_profile: N must be >= 0");
  QProfile prof;
  prof.tol = tol;
  for (Index n = 0; n <= N; ++n) prof.widths.push_back(gen_kolmogorov_number(D, Q, n, opts));

  auto& w = prof.widths;
  for (std::size_t n = 1; n < w.size(); ++n) {
    if (w[n].upper > w[n - 1].upper + tol) prof.raw_monotone = false;
    w[n].upper = std::min(w[n].upper, w[n - 1].upper);
  }
  for (std::size_t n = w.size() - 1; n-- > 0;) w[n].lower = std::max(w[n].lower, w[n + 1].lower);
  for (auto& r : w) {
    if (r.value) {
      r.value = r.upper;
      if (r.lower > r.upper) r.lower = r.upper;
    } else {
      settle_value(r, Q.is_classical() ? 1e-9 : std::max(opts.value_tol, 1e-12));
    }
  }

  const double d0 = w.front().upper;
  if (w.back().upper < tol) prof.verdict = Verdict::evidence_compact;
  else if (d0 > 0.0 && w.back().lower >= stall_ratio * d0) prof.verdict = Verdict::evidence_noncompact;
  else prof.verdict = Verdict::inconclusive;
  return prof;
}

namespace {

enum class Codomain { euclidean, weighted_l2, sup };

Codomain codomain_of(const GeneralizedScheme& Q) {
  if (!Q.is_classical()) return Codomain::euclidean;
  const Scheme& s = Q.scheme();
  switch (s.kind()) {
    case SchemeKind::poly_sup: return Codomain::sup;
    case SchemeKind::trig_l2: return Codomain::weighted_l2;
    case SchemeKind::subspace_chain: return Codomain::euclidean;
    case SchemeKind::nterm_lp:
      if (s.space_p() == 2.0) return Codomain::euclidean;
      if (std::isinf(s.space_p())) return Codomain::sup;
      throw PreconditionError("operator_delta: l^p codomain needs p = 2 or p = inf");
  }
  return Codomain::euclidean;
}

double spectral_norm(const MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(A);
  return svd.singularValues()(0);
}

double max_row_norm(const MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  return A.rowwise().norm().maxCoeff();
}

double norm_in(Codomain c, const MatrixXd& T, const GeneralizedScheme& Q) {
  switch (c) {
    case Codomain::euclidean: return spectral_norm(T);
    case Codomain::sup: return max_row_norm(T);
    case Codomain::weighted_l2:
      return spectral_norm(Q.scheme().sqrt_weights().asDiagonal() * T);
  }
  return 0.0;
}

// max over sampled unit vectors y of the certified lower bound on E(Ty, A_n).
double sampled_lower(const MatrixXd& T, const Scheme& s, Index n, const OperatorOptions& opts) {
  std::vector<VectorXd> ys;
  Eigen::JacobiSVD<MatrixXd> svd(T, Eigen::ComputeFullV);
  const MatrixXd& V = svd.matrixV();
  for (Index j = 0; j < V.cols(); ++j) {
    ys.push_back(V.col(j));
    ys.push_back(-V.col(j));
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  while (Index(ys.size()) < opts.sphere_samples) {
    VectorXd y(T.cols());
    for (Index i = 0; i < y.size(); ++i) y(i) = gauss(rng);
    const double ny = y.norm();
    if (ny > 0.0) ys.push_back(y / ny);
  }
  double best = 0.0;
  for (const VectorXd& y : ys)
    best = std::max(best, best_error(s.make_element(T * y), s, n).lower_bound);
  return best;
}

}  // namespace

double operator_norm(const MatrixXd& T, const GeneralizedScheme& Q) {
  detail::require(T.allFinite(), "operator_norm: T must be finite");
  detail::require(T.rows() == Q.dimension(),
                  "operator_norm: T has " + std::to_string(T.rows()) +
                      " rows but the codomain has dimension " + std::to_string(Q.dimension()));
  return norm_in(codomain_of(Q), T, Q);
}

WidthResult operator_delta(const MatrixXd& T, const GeneralizedScheme& Q, Index n,
                           const OperatorOptions& opts) {
  detail::require(n >= 0, "operator_delta: n must be >= 0");
  const double tn = operator_norm(T, Q);
  WidthResult r;
  r.n = n;
  r.method = WidthMethod::exact_reduction;
  if (n == 0 || T.cols() == 0) {
    r.lower = r.upper = tn;
    r.value = tn;
    r.optimizer = "{0}";
    return r;
  }

  if (!Q.is_classical()) {
    Eigen::JacobiSVD<MatrixXd> svd(T, Eigen::ComputeFullU);
    const VectorXd& sv = svd.singularValues();
    const double v = n < sv.size() ? sv(n) : 0.0;
    r.lower = r.upper = v;
    r.value = v;
    const Index keep = std::min<Index>(n, T.rows());
    r.basis = svd.matrixU().leftCols(keep);
    r.optimizer = "leading " + std::to_string(keep) + " left singular vectors";
    return r;
  }

  const Scheme& s = Q.scheme();
  const Index e = s.effective_index(n);
  if (s.has_projections()) {
    const MatrixXd Qk = s.orthonormal_basis().leftCols(s.dimension(n));
    const MatrixXd WT = s.sqrt_weights().asDiagonal() * T;
    const double v = spectral_norm(WT - Qk * (Qk.transpose() * WT));
    r.lower = r.upper = v;
    r.value = v;
    r.optimizer = "A_" + std::to_string(n) + " (orthogonal projection of the ellipsoid)";
    r.sampled_lower = sampled_lower(T, s, n, opts);
    return r;
  }

  const Codomain c = codomain_of(Q);
  double upper = 0.0;
  if (s.kind() == SchemeKind::poly_sup) {
    if (e + 1 >= T.rows()) {
      upper = 0.0;
    } else {
      const MatrixXd V = chebyshev_vandermonde(*s.grid(), e);
      Eigen::HouseholderQR<MatrixXd> qr(V);
      const MatrixXd Qv = qr.householderQ() * MatrixXd::Identity(V.rows(), V.cols());
      upper = max_row_norm(T - Qv * (Qv.transpose() * T));
    }
    r.optimizer = "A_" + std::to_string(n) + " (least-squares projector bound)";
  } else {
    // keep the n rows of largest norm
    std::vector<Index> order(static_cast<std::size_t>(T.rows()));
    for (Index i = 0; i < T.rows(); ++i) order[std::size_t(i)] = i;
    const VectorXd rn = T.rowwise().norm();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return rn(a) > rn(b); });
    MatrixXd rest = T;
    for (Index i = 0; i < std::min(n, T.rows()); ++i) rest.row(order[std::size_t(i)]).setZero();
    upper = norm_in(c, rest, Q);
    r.optimizer = "A_" + std::to_string(n) + " (fixed support of the largest rows)";
  }
  const double lower = sampled_lower(T, s, n, opts);
  r.sampled_lower = lower;
  r.lower = std::min(lower, upper);
  r.upper = upper;
  r.method = WidthMethod::sampled;
  settle_value(r, 1e-9);
  return r;
}

UniformLimitReport uniform_limit_check(std::span<const MatrixXd> T_seq, const MatrixXd& T,
                                       const GeneralizedScheme& Q, Index n, double tol,
                                       const OperatorOptions& opts) {
  UniformLimitReport rep;
  rep.n = n;
  rep.tol = tol;
  rep.delta_T_lower = operator_delta(T, Q, n, opts).lower;
  const Index m = Index(T_seq.size());
  rep.distances.resize(m);
  rep.delta_upper.resize(m);
  rep.margins.resize(m);
  for (Index i = 0; i < m; ++i) {
    const MatrixXd& Tm = T_seq[std::size_t(i)];
    detail::require(Tm.rows() == T.rows() && Tm.cols() == T.cols(),
                    "uniform_limit_check: T_" + std::to_string(i) + " has a different shape");
    rep.distances(i) = operator_norm(T - Tm, Q);
    rep.delta_upper(i) = operator_delta(Tm, Q, n, opts).upper;
    rep.margins(i) = rep.distances(i) + rep.delta_upper(i) - rep.delta_T_lower;
    if (rep.margins(i) < -tol) rep.holds = false;
  }
  return rep;
}

OrderC0Decomposition order_c0_decompose(std::span<const Element> D, const Scheme& s, Index depth,
                                        std::optional<Index> horizon,
                                        std::optional<double> scale) {
  detail::require(!D.empty(), "order_c0_decompose: D must be nonempty");
  detail::require(depth >= 1, "order_c0_decompose: depth must be >= 1");
  for (const Element& x : D) s.require_compatible(x, "order_c0_decompose");
  const Index H = horizon.value_or(s.saturation_index());
  detail::require(H >= 0, "order_c0_decompose: horizon must be >= 0");

  double max_norm = 0.0;
  for (const Element& x : D) max_norm = std::max(max_norm, norm(x));
  OrderC0Decomposition out;
  out.depth = depth;
  out.scale = scale.value_or(max_norm);
  detail::require(out.scale >= 0.0 && std::isfinite(out.scale),
                  "order_c0_decompose: scale must be finite and >= 0");
  detail::require(max_norm <= out.scale * (1.0 + 1e-12),
                  "order_c0_decompose: D does not lie in scale * U");
  const double sc = out.scale;
  const double inv = sc > 0.0 ? 1.0 / sc : 0.0;
  const double slack = 1e-12;

  std::vector<Element> r;
  for (const Element& x : D) r.push_back(inv * x);
  out.points.resize(D.size());
  for (auto& p : out.points) {
    p.coefficients.resize(depth);
    p.residual_norms.resize(depth);
    p.reconstruction_errors.resize(depth);
  }
  std::vector<Element> recon;
  for (const Element& x : D) recon.push_back(x.zero_like());

  for (Index k = 1; k <= depth; ++k) {
    OrderC0Level lvl;
    lvl.stage = k;
    lvl.threshold = std::ldexp(1.0, -int(k + 1));
    lvl.atom_bound = 3.0 * std::ldexp(1.0, -int(k - 2)) * sc;
    lvl.residual_bound = std::ldexp(1.0, -int(2 * k)) * sc;

    std::vector<Element> twice;
    for (const Element& x : r) twice.push_back(2.0 * x);
    std::vector<BestApprox> atoms;
    Index nk = -1;
    for (Index n = 0; n <= H && nk < 0; ++n) {
      atoms.clear();
      bool ok = true;
      for (const Element& x : twice) {
        atoms.push_back(best_error(x, s, n));
        if (atoms.back().error > lvl.threshold) {
          ok = false;
          break;
        }
      }
      if (ok) nk = n;
    }
    if (nk < 0)
      throw PreconditionError("order_c0_decompose: stage " + std::to_string(k) +
                              " needs E(2 D_" + std::to_string(k - 1) + ", A_n) <= 2^-" +
                              std::to_string(k + 1) + ", not reached within horizon " +
                              std::to_string(H));
    lvl.n = nk;
    const double lambda = std::ldexp(1.0, -int(k));
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Element& b = atoms[i].approximant;
      r[i] = twice[i] - b;
      const Element atom = sc * b;
      recon[i] = recon[i] + lambda * atom;
      OrderC0Point& p = out.points[i];
      p.atoms.push_back(atom);
      p.coefficients(k - 1) = lambda;
      p.residual_norms(k - 1) = lambda * norm(r[i]) * sc;
      p.reconstruction_errors(k - 1) = distance(D[i], recon[i]);
      lvl.max_atom_norm = std::max(lvl.max_atom_norm, norm(atom));
      lvl.max_residual = std::max(lvl.max_residual, p.residual_norms(k - 1));
      lvl.max_reconstruction_error =
          std::max(lvl.max_reconstruction_error, p.reconstruction_errors(k - 1));
    }
    if (lvl.max_atom_norm > lvl.atom_bound * (1.0 + slack) + slack ||
        lvl.max_residual > lvl.residual_bound * (1.0 + slack) + slack)
      out.certified = false;
    out.coefficient_sum += lambda;
    out.levels.push_back(lvl);
  }
  return out;
}

HullReport hull_invariance_check(std::span<const Element> D, const Scheme& s, Index n,
                                 Index samples, std::uint64_t seed, std::optional<double> tol) {
  if (!s.is_linear())
    throw PreconditionError(std::string("hull_invariance_check: scheme ") + to_string(s.kind()) +
                            " is not linear");
  detail::require(!D.empty(), "hull_invariance_check: D must be nonempty");
  detail::require(samples >= 0, "hull_invariance_check: samples must be >= 0");
  HullReport rep;
  rep.n = n;
  rep.samples = samples;
  for (std::size_t i = 0; i < D.size(); ++i) {
    const double e = best_error(D[i], s, n).error;
    if (i == 0 || e > rep.vertex_value) {
      rep.vertex_value = e;
      rep.attained_by = Index(i);
    }
  }
  rep.tol = tol.value_or(default_tolerance(s) * std::max(1.0, rep.vertex_value));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Index m = Index(D.size());
  for (Index t = 0; t < samples; ++t) {
    VectorXd lambda(m);
    for (Index i = 0; i < m; ++i) lambda(i) = gauss(rng);
    const double l1 = lambda.cwiseAbs().sum();
    if (l1 == 0.0) continue;
    lambda *= unif(rng) / l1;
    const Element y = absolutely_convex_combination(D, lambda);
    const double e = best_error(y, s, n).error;
    rep.max_hull_value = std::max(rep.max_hull_value, e);
    if (e > rep.vertex_value + rep.tol) ++rep.violations;
  }
  rep.holds = rep.violations == 0;
  return rep;
}

BallMeasure ball_measure(std::span<const Element> D, const GeneralizedScheme& Q, Index N,
                         double tol, const WidthOptions& opts) {
  const QProfile prof = q_profile(D, Q, N, tol, opts);
  BallMeasure out;
  out.horizon = N;
  out.estimate = prof.widths.back().upper;
  out.lower = prof.widths.back().lower;
  out.delta0 = prof.widths.front().upper;
  out.gap = N >= 1 ? prof.widths[std::size_t(N - 1)].upper - out.estimate : 0.0;
  out.verdict = prof.verdict;
  return out;
}

namespace {

// Distance from x to span(B) in the scheme's norm: exact for the l^2 kinds,
// least-squares residual (an upper bound) otherwise.
double span_distance(const Element& x, const MatrixXd& Bw, const VectorXd& sw, bool exact) {
  const VectorXd y = sw.cwiseProduct(x.values());
  if (Bw.cols() == 0) return exact ? y.norm() : norm(x);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(Bw);
  qr.setThreshold(1e-12);
  const VectorXd c = qr.solve(y);
  const VectorXd res = y - Bw * c;
  if (exact) return res.norm();
  return norm(x.with_values(res.cwiseQuotient(sw)));
}

}  // namespace

NetBoundReport compact_implies_qcompact_check(std::span<const Element> D,
                                              const GeneralizedScheme& Q,
                                              const std::vector<double>& eps_schedule,
                                              Index horizon, std::optional<double> tol) {
  detail::require(Q.is_classical(), "compact_implies_qcompact_check: needs a classical scheme");
  detail::require(!D.empty(), "compact_implies_qcompact_check: D must be nonempty");
  detail::require(horizon >= 0, "compact_implies_qcompact_check: horizon must be >= 0");
  const Scheme& s = Q.scheme();
  for (const Element& x : D) s.require_compatible(x, "compact_implies_qcompact_check");

  NetBoundReport rep;
  rep.tol = tol.value_or(default_tolerance(s));
  const bool l2 = s.space_p() == 2.0;
  const VectorXd sw = s.has_projections() ? s.sqrt_weights() : VectorXd::Ones(s.ambient_dimension());

  for (double eps : eps_schedule) {
    detail::require(eps > 0.0, "compact_implies_qcompact_check: epsilon must be > 0");
    const NetResult net = epsilon_net(D, eps);
    NetBoundRow row;
    row.epsilon = eps;
    row.centers = Index(net.centers.size());

    std::vector<VectorXd> approximants;
    std::set<Index> support;
    for (const Element& c : net.centers) {
      Index m = horizon;
      BestApprox ba = best_error(c, s, horizon);
      for (Index n = 0; n <= horizon; ++n) {
        BestApprox cand = best_error(c, s, n);
        if (cand.error <= eps) {
          m = n;
          ba = std::move(cand);
          break;
        }
      }
      row.N = std::max(row.N, m);
      if (const auto* sc = std::get_if<SupportCertificate>(&ba.certificate))
        support.insert(sc->support.begin(), sc->support.end());
      approximants.push_back(ba.approximant.values());
    }

    MatrixXd Bw(s.ambient_dimension(), Index(approximants.size()));
    for (Index j = 0; j < Bw.cols(); ++j) Bw.col(j) = sw.cwiseProduct(approximants[std::size_t(j)]);

    row.K = s.is_linear() ? row.N : Index(support.size());
    for (const Element& x : D) {
      row.delta = std::max(row.delta, best_error(x, s, row.K).error);
      if (s.is_linear()) {
        row.e_tilde = row.delta;
      } else {
        VectorXd off = x.values();
        for (Index i : support) off(i) = 0.0;
        row.e_tilde = std::max(row.e_tilde, detail::lp_norm(off, s.space_p()));
      }
      row.e_span = std::max(row.e_span, span_distance(x, Bw, sw, l2));
    }
    row.span_exact = l2;
    row.holds = row.delta <= row.e_tilde + rep.tol && row.e_tilde <= row.e_span + rep.tol;
    rep.holds = rep.holds && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace approxwidths
