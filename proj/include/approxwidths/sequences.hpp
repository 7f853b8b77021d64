#pragma once

// Finite-horizon sequence-space norms: non-increasing rearrangements,
// Lorentz norms, weighted l^q(beta) norms and finite evidence for c_0(beta)
// membership and for divergence of a weight sequence.
//
// Sequences are indexed from 0. Everything here is a pure function templated
// on the Eigen expression type, so arbitrary dense expressions can be passed
// without materializing them first.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "approxwidths/error.hpp"

namespace approxwidths {

template <typename Scalar>
using Seq = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealSeq = Seq<double>;

/// Weight sequence beta = (b_n) together with its summation exponent q in
/// [1, inf]. q = inf selects the weighted-sup norm sup_n b_n |a_n|.
template <typename Scalar>
struct WeightSequence {
  Seq<Scalar> values;
  Scalar q = Scalar(1);

  Eigen::Index size() const { return values.size(); }
  bool is_sup() const { return std::isinf(q); }
};

using Weights = WeightSequence<double>;

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!std::isfinite(a(i)))
      throw PreconditionError(std::string(what) + ": entry " + std::to_string(i) +
                              " is not finite");
}

template <typename Scalar>
void require_weights(const WeightSequence<Scalar>& w) {
  if (!(w.q >= Scalar(1)))
    throw PreconditionError("weight sequence: q must lie in [1, inf]");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w.values(i) >= Scalar(0)) || !std::isfinite(w.values(i)))
      throw PreconditionError("weight sequence: b_" + std::to_string(i) +
                              " must be finite and non-negative");
}

}  // namespace detail

/// Copy of `a` sorted non-increasingly.
template <typename Derived>
Seq<typename Derived::Scalar> nonincreasing_rearrangement(const Eigen::MatrixBase<Derived>& a) {
  Seq<typename Derived::Scalar> out = a;
  std::sort(out.data(), out.data() + out.size(), std::greater<>());
  return out;
}

/// Lorentz l_{p,r} norm (sum_{n>=1} n^{rp-1} (a*_n)^p)^{1/p}, where a* is the
/// non-increasing rearrangement of |a| and storage index 0 carries n = 1.
template <typename Derived>
typename Derived::Scalar lorentz_norm(const Eigen::MatrixBase<Derived>& a,
                                      typename Derived::Scalar p,
                                      typename Derived::Scalar r) {
  using Scalar = typename Derived::Scalar;
  detail::require(p >= Scalar(1) && std::isfinite(p), "lorentz_norm: p must be finite and >= 1");
  detail::require(r > Scalar(0), "lorentz_norm: r must be > 0");
  detail::require_finite(a, "lorentz_norm");
  const Seq<Scalar> sorted = nonincreasing_rearrangement(a.cwiseAbs());
  Scalar sum(0);
  for (Eigen::Index i = 0; i < sorted.size(); ++i) {
    if (sorted(i) == Scalar(0)) break;
    const Scalar n = Scalar(i + 1);
    sum += std::pow(n, r * p - Scalar(1)) * std::pow(sorted(i), p);
  }
  return std::pow(sum, Scalar(1) / p);
}

/// (sum_n b_n |a_n|^q)^{1/q}, or sup_n b_n |a_n| when q = inf. The shorter of
/// the two sequences is treated as zero-padded.
template <typename Derived>
typename Derived::Scalar weighted_lq_norm(const Eigen::MatrixBase<Derived>& a,
                                          const WeightSequence<typename Derived::Scalar>& w) {
  using Scalar = typename Derived::Scalar;
  detail::require_weights(w);
  detail::require_finite(a, "weighted_lq_norm");
  const Eigen::Index len = std::min(a.size(), w.size());
  if (w.is_sup()) {
    Scalar best(0);
    for (Eigen::Index i = 0; i < len; ++i) best = std::max(best, w.values(i) * std::abs(a(i)));
    return best;
  }
  Scalar sum(0);
  for (Eigen::Index i = 0; i < len; ++i) {
    if (a(i) == Scalar(0) || w.values(i) == Scalar(0)) continue;
    sum += w.values(i) * std::pow(std::abs(a(i)), w.q);
  }
  return std::pow(sum, Scalar(1) / w.q);
}

enum class Trend { decreasing, flat, increasing, mixed };

inline const char* to_string(Trend t) {
  switch (t) {
    case Trend::decreasing: return "decreasing";
    case Trend::flat: return "flat";
    case Trend::increasing: return "increasing";
    case Trend::mixed: return "mixed";
  }
  return "mixed";
}

template <typename Scalar>
struct DecayReport {
  Scalar trailing_max{};  ///< max of a_n b_n over the last `window` indices
  Trend trend = Trend::flat;
  Eigen::Index window = 0;
  Eigen::Index horizon = 0;
};

/// Finite proxy for a_n b_n -> 0. The trend flag looks at the `window` steps
/// ending at the horizon, i.e. at the products on indices horizon-window ..
/// horizon.
template <typename Derived>
DecayReport<typename Derived::Scalar> c0_beta_decay(
    const Eigen::MatrixBase<Derived>& a, const WeightSequence<typename Derived::Scalar>& w,
    Eigen::Index window) {
  using Scalar = typename Derived::Scalar;
  detail::require_weights(w);
  detail::require_finite(a, "c0_beta_decay");
  detail::require(a.size() >= 1, "c0_beta_decay: empty sequence");
  const Eigen::Index horizon = a.size() - 1;
  detail::require(window >= 1 && window <= horizon, "c0_beta_decay: window must lie in [1, horizon]");

  Seq<Scalar> prod = Seq<Scalar>::Zero(a.size());
  for (Eigen::Index i = 0; i < std::min(a.size(), w.size()); ++i)
    prod(i) = std::abs(a(i)) * w.values(i);

  DecayReport<Scalar> rep;
  rep.window = window;
  rep.horizon = horizon;
  rep.trailing_max = prod.tail(window).maxCoeff();

  const auto seg = prod.tail(window + 1);
  const Scalar scale = std::max(seg.cwiseAbs().maxCoeff(), std::numeric_limits<Scalar>::min());
  const Scalar tol = Scalar(1e-12) * scale;
  bool any_down = false, any_up = false;
  for (Eigen::Index i = 0; i + 1 < seg.size(); ++i) {
    const Scalar d = seg(i + 1) - seg(i);
    if (d < -tol) any_down = true;
    if (d > tol) any_up = true;
  }
  rep.trend = any_down ? (any_up ? Trend::mixed : Trend::decreasing)
                       : (any_up ? Trend::increasing : Trend::flat);
  return rep;
}

template <typename Scalar>
struct GrowthReport {
  bool attained = false;
  Eigen::Index prefix_length = 0;  ///< number of leading weights used
  Scalar partial_norm{};           ///< l^q norm of that prefix (whole sequence if not attained)
  Scalar threshold{};
};

/// Smallest prefix length whose l^q partial norm reaches `threshold`; finite
/// evidence for ||beta||_{l^q} = inf.
template <typename Scalar>
GrowthReport<Scalar> divergence_witness(const WeightSequence<Scalar>& w, Scalar threshold) {
  detail::require_weights(w);
  detail::require(threshold > Scalar(0), "divergence_witness: threshold must be > 0");
  GrowthReport<Scalar> rep;
  rep.threshold = threshold;
  Scalar acc(0);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const Scalar b = w.values(i);
    acc = w.is_sup() ? std::max(acc, b) : acc + std::pow(b, w.q);
    const Scalar partial = w.is_sup() ? acc : std::pow(acc, Scalar(1) / w.q);
    rep.partial_norm = partial;
    if (partial >= threshold) {
      rep.attained = true;
      rep.prefix_length = i + 1;
      return rep;
    }
  }
  rep.prefix_length = w.size();
  return rep;
}

}  // namespace approxwidths
