#include "approxwidths/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace approxwidths {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::evidence_compact: return "evidence-compact";
    case Verdict::evidence_noncompact: return "evidence-noncompact";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

bool ErrorProfile::monotone(double tol) const {
  for (Index n = 0; n + 1 < values.size(); ++n)
    if (values(n + 1) > values(n) + tol) return false;
  return true;
}

ErrorProfile error_profile(std::span<const Element> family, const Scheme& s, Index horizon,
                           const MinimaxOptions& opts) {
  detail::require(!family.empty(), "error_profile: family must be nonempty");
  detail::require(horizon >= 0, "error_profile: horizon must be >= 0");
  for (const Element& x : family) s.require_compatible(x, "error_profile");

  ErrorProfile prof{.scheme = s,
                    .values = VectorXd::Zero(horizon + 1),
                    .lower = VectorXd::Zero(horizon + 1),
                    .argmax = std::vector<Index>(std::size_t(horizon + 1), 0),
                    .horizon = horizon,
                    .family_size = Index(family.size()),
                    .any_near_best = false,
                    .tolerance = s.kind() == SchemeKind::poly_sup ? opts.tolerance
                                                                  : default_tolerance(s)};
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (Index n = 0; n <= horizon; ++n) {
      const BestApprox ba = best_error(family[i], s, n, opts);
      prof.any_near_best = prof.any_near_best || ba.near_best;
      if (ba.error > prof.values(n)) {
        prof.values(n) = ba.error;
        prof.argmax[std::size_t(n)] = Index(i);
      }
      prof.lower(n) = std::max(prof.lower(n), ba.lower_bound);
    }
  }
  return prof;
}

CompactnessReport compactness_test(std::span<const Element> family, const Scheme& s, Index horizon,
                                   const CompactnessOptions& opts) {
  ErrorProfile prof = error_profile(family, s, horizon);

  const Index size = Index(family.size());
  VectorXd norms(size);
  for (Index i = 0; i < size; ++i) norms(i) = norm(family[std::size_t(i)]);
  const double max_norm = norms.maxCoeff();
  const double head_max = norms.head((size + 1) / 2).maxCoeff();

  CompactnessReport rep{.verdict = Verdict::inconclusive,
                        .bounded = true,
                        .max_norm = max_norm,
                        .envelope_growth = 0.0,
                        .decay_statistic = 0.0,
                        .profile = std::move(prof),
                        .options = opts};
  if (head_max > 0.0) rep.envelope_growth = max_norm / head_max - 1.0;
  else if (max_norm > 0.0) rep.envelope_growth = kInf;

  if (opts.norm_bound) rep.bounded = max_norm <= *opts.norm_bound;
  else rep.bounded = std::isfinite(max_norm) && rep.envelope_growth <= opts.growth_tol;

  const VectorXd& a = rep.profile.values;
  const double tail = a(horizon);
  rep.decay_statistic = a(0) > 0.0 ? tail / a(0) : 0.0;

  if (!rep.bounded) rep.verdict = Verdict::evidence_noncompact;
  else if (tail <= opts.tol) rep.verdict = Verdict::evidence_compact;
  else if (rep.decay_statistic >= opts.stall_ratio) rep.verdict = Verdict::evidence_noncompact;
  else rep.verdict = Verdict::inconclusive;
  return rep;
}

NetResult epsilon_net(std::span<const Element> family, double radius) {
  detail::require(radius > 0.0, "epsilon_net: radius must be > 0");
  NetResult net;
  net.radius = radius;
  if (family.empty()) return net;

  const Index size = Index(family.size());
  net.center_distance = VectorXd::Constant(size, kInf);
  net.assignment.assign(std::size_t(size), 0);

  Index next = 0;
  while (true) {
    const Index c = Index(net.centers.size());
    net.centers.push_back(family[std::size_t(next)]);
    net.center_indices.push_back(next);
    for (Index i = 0; i < size; ++i) {
      const double d = distance(family[std::size_t(i)], family[std::size_t(next)]);
      if (d < net.center_distance(i)) {
        net.center_distance(i) = d;
        net.assignment[std::size_t(i)] = c;
      }
    }
    Index far = 0;
    const double worst = net.center_distance.maxCoeff(&far);
    if (worst <= radius) break;
    next = far;
  }
  net.iterations = Index(net.centers.size());
  net.covered.resize(std::size_t(size));
  for (Index i = 0; i < size; ++i) net.covered[std::size_t(i)] = net.center_distance(i) <= radius;
  return net;
}

ShiftDecomposition shift_decomposition(std::span<const Element> family, const Scheme& s,
                                       Index horizon) {
  const ErrorProfile prof = error_profile(family, s, horizon);
  Index N = -1;
  for (Index n = 0; n <= horizon; ++n)
    if (prof.values(n) <= 0.5) {
      N = n;
      break;
    }
  if (N < 0)
    throw PreconditionError("shift_decomposition: E(M, A_n) stays above 1/2 up to horizon " +
                            std::to_string(horizon));

  ShiftDecomposition out;
  out.N = N;
  out.profile_at_N = prof.values(N);
  for (const Element& x : family) {
    const BestApprox ba = best_error(x, s, N);
    Element y = x - ba.approximant;
    out.max_remainder_norm = std::max(out.max_remainder_norm, norm(y));
    out.reconstruction_defect =
        std::max(out.reconstruction_defect, distance(ba.approximant + y, x));
    out.approximants.push_back(ba.approximant);
    out.remainders.push_back(std::move(y));
  }
  if (out.max_remainder_norm > 1.0)
    throw SolverError("shift_decomposition: remainder left the unit ball (|y| = " +
                      std::to_string(out.max_remainder_norm) + ")");
  return out;
}

WitnessWeights witness_weights(const VectorXd& profile, double q) {
  detail::require(q >= 1.0 && std::isfinite(q), "witness_weights: q must be finite and >= 1");
  detail::require(profile.size() >= 1, "witness_weights: empty profile");
  for (Index n = 0; n < profile.size(); ++n)
    detail::require(std::isfinite(profile(n)) && profile(n) >= 0.0,
                    "witness_weights: profile entries must be finite and >= 0");
  if (profile.maxCoeff() > 1.0 + 1e-12)
    throw PreconditionError("witness_weights: profile exceeds 1; rescale the family into the unit ball");

  // n_k for k = 1, 2, ...; zero entries reach every level, so cap the count at
  // the last representable dyadic level.
  constexpr Index kMaxLevels = 1074;
  std::set<Index> units;
  Index levels = 0;
  Index start = 0;
  for (Index k = 1; k <= kMaxLevels; ++k) {
    const double target = std::ldexp(1.0, -int(k));
    Index nk = -1;
    for (Index n = start; n < profile.size(); ++n)
      if (profile(n) <= target) {
        nk = n;
        break;
      }
    if (nk < 0) break;
    // alpha is not assumed monotone, but the first hit for 2^-k can never
    // precede the first hit for 2^-(k-1)
    start = nk;
    units.insert(nk);
    levels = k;
  }
  if (levels == 0)
    throw PreconditionError("witness_weights: profile never reaches 1/2 within the horizon");

  WitnessWeights out;
  out.beta.q = q;
  out.beta.values.resize(profile.size());
  for (Index n = 0; n < profile.size(); ++n) {
    const double a = profile(n);
    if (units.count(n) || a == 0.0) out.beta.values(n) = 1.0;
    else out.beta.values(n) = 1.0 / (std::ldexp(1.0, int(n)) * a);
  }
  out.unit_indices.assign(units.begin(), units.end());
  out.levels = levels;
  double sum = 0.0;
  for (Index n = 0; n < profile.size(); ++n)
    if (profile(n) > 0.0) sum += out.beta.values(n) * std::pow(profile(n), q);
  out.profile_sum = sum;
  return out;
}

WitnessWeights witness_weights(const ErrorProfile& profile, double q) {
  return witness_weights(profile.values, q);
}

double modulus_of_continuity(const Element& f, double delta) {
  detail::require(f.kind() != SpaceKind::seq_lp, "modulus_of_continuity: grid element required");
  detail::require(delta > 0.0, "modulus_of_continuity: delta must be > 0");
  const Grid& g = *f.grid();
  const VectorXd& v = f.values();
  const double slack = 1e-12 * (g.b() - g.a());
  double best = 0.0;
  for (Index i = 0; i < g.size(); ++i)
    for (Index j = i + 1; j < g.size() && g.node(j) - g.node(i) <= delta + slack; ++j)
      best = std::max(best, std::abs(v(j) - v(i)));
  return best;
}

EquicontinuityReport equicontinuity_report(std::span<const Element> family, VectorXd deltas,
                                           double fraction) {
  detail::require(!family.empty(), "equicontinuity_report: family must be nonempty");
  detail::require(deltas.size() >= 1, "equicontinuity_report: at least one delta is required");
  for (const Element& f : family)
    require_same_space(family.front(), f, "equicontinuity_report (common grid)");
  std::sort(deltas.data(), deltas.data() + deltas.size());

  EquicontinuityReport rep;
  rep.fraction = fraction;
  rep.deltas = deltas;
  rep.sup_modulus = VectorXd::Zero(deltas.size());
  for (const Element& f : family) {
    rep.uniform_bound = std::max(rep.uniform_bound, f.values().cwiseAbs().maxCoeff());
    for (Index i = 0; i < deltas.size(); ++i)
      rep.sup_modulus(i) = std::max(rep.sup_modulus(i), modulus_of_continuity(f, deltas(i)));
  }
  rep.oscillation_bound = 2.0 * rep.uniform_bound;
  for (Index i = 0; i + 1 < deltas.size(); ++i)
    if (rep.sup_modulus(i) > rep.sup_modulus(i + 1)) rep.monotone = false;
  rep.equicontinuous = rep.sup_modulus(0) <= fraction * rep.oscillation_bound;
  return rep;
}

JacksonReport jackson_ratio(const Element& f, const Scheme& s, Index n_min, Index n_max,
                            const MinimaxOptions& opts) {
  detail::require(s.kind() == SchemeKind::poly_sup, "jackson_ratio: poly_sup scheme required");
  detail::require(n_min >= 0 && n_min <= n_max, "jackson_ratio: empty degree range");
  s.require_compatible(f, "jackson_ratio");
  const Grid& g = *s.grid();
  const VectorXd& v = f.values();
  const bool constant =
      v.maxCoeff() - v.minCoeff() <= 1e-14 * std::max(1.0, v.cwiseAbs().maxCoeff());

  JacksonReport rep;
  const Index count = n_max - n_min + 1;
  rep.errors = VectorXd::Zero(count);
  rep.moduli = VectorXd::Zero(count);
  rep.ratios = VectorXd::Zero(count);
  for (Index i = 0; i < count; ++i) {
    const Index n = n_min + i;
    rep.degrees.push_back(n);
    if (constant) continue;
    rep.errors(i) = best_error(f, s, n, opts).error;
    rep.moduli(i) = modulus_of_continuity(f, (g.b() - g.a()) / double(n + 1));
    if (rep.moduli(i) == 0.0)
      throw PreconditionError("jackson_ratio: grid too coarse to resolve w(f, (b-a)/" +
                              std::to_string(n + 1) + ")");
    rep.ratios(i) = rep.errors(i) / rep.moduli(i);
  }
  rep.max_ratio = rep.ratios.maxCoeff();
  return rep;
}

Element lethargy_witness(const VectorXd& eps, const Scheme& chain) {
  detail::require(chain.kind() == SchemeKind::subspace_chain,
                  "lethargy_witness: orthonormal subspace_chain required");
  const Index d = eps.size();
  detail::require(d >= 1 && d <= chain.saturation_index(),
                  "lethargy_witness: need 1 <= len(eps) <= chain length");
  for (Index k = 0; k < d; ++k) {
    detail::require(std::isfinite(eps(k)) && eps(k) >= 0.0,
                    "lethargy_witness: eps entries must be finite and >= 0");
    if (k > 0 && eps(k) > eps(k - 1))
      throw PreconditionError("lethargy_witness: eps increases at index " + std::to_string(k));
  }
  VectorXd coeff(d);
  for (Index k = 0; k < d; ++k) {
    const double hi = eps(k), lo = (k + 1 < d) ? eps(k + 1) : 0.0;
    coeff(k) = std::sqrt((hi - lo) * (hi + lo));
  }
  return chain.make_element(chain.orthonormal_basis().leftCols(d) * coeff);
}

ProjectionDefectReport projection_defect(std::span<const Element> family, const Scheme& s, Index k,
                                         double tol) {
  if (!s.has_projections())
    throw PreconditionError(std::string("projection_defect: scheme ") + to_string(s.kind()) +
                            " has no linear projections");
  detail::require(!family.empty(), "projection_defect: family must be nonempty");
  ProjectionDefectReport rep;
  rep.k = k;
  rep.tol = tol;
  rep.projection_norm = projection_bound(s, k);
  rep.bound_factor = 1.0 + rep.projection_norm;
  const Index size = Index(family.size());
  rep.residuals.resize(size);
  rep.best_errors.resize(size);
  rep.max_violation = -kInf;
  for (Index i = 0; i < size; ++i) {
    const Element& f = family[std::size_t(i)];
    rep.residuals(i) = distance(f, apply_projection(f, s, k));
    rep.best_errors(i) = best_error(f, s, k).error;
    const double viol = rep.residuals(i) - rep.bound_factor * rep.best_errors(i);
    rep.max_violation = std::max(rep.max_violation, viol);
    if (viol > tol) rep.holds = false;
    if (rep.best_errors(i) > 0.0)
      rep.max_ratio = std::max(rep.max_ratio, rep.residuals(i) / rep.best_errors(i));
  }
  return rep;
}

}  // namespace approxwidths
