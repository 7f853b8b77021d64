#include "approxwidths/approx_spaces.hpp"

namespace approxwidths {

namespace {

void validate(const ApproxSpaceSpec& spec) {
  detail::require(spec.horizon >= 1, "approximation space: horizon must be >= 1");
  const auto check_weights = [](const Weights& w) {
    detail::require(w.size() >= 1 && w.values(0) > 0.0,
                    "approximation space: weighted norms need b_0 > 0");
  };
  if (const auto* w = std::get_if<WeightedLq>(&spec.sequence_norm)) check_weights(w->beta);
  if (const auto* w = std::get_if<WeightedLq0>(&spec.sequence_norm)) check_weights(w->beta);
}

}  // namespace

VectorXd element_profile(const Element& x, const Scheme& s, Index horizon) {
  detail::require(horizon >= 0, "element_profile: horizon must be >= 0");
  VectorXd out(horizon + 1);
  for (Index n = 0; n <= horizon; ++n) out(n) = best_error(x, s, n).error;
  return out;
}

ApproxNormReport approx_space_evaluate(const Element& x, const ApproxSpaceSpec& spec) {
  validate(spec);
  ApproxNormReport rep;
  rep.horizon = spec.horizon;
  rep.profile = element_profile(x, spec.scheme, spec.horizon);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LorentzNorm>) {
          rep.norm = lorentz_norm(rep.profile, s.p, s.r);
        } else if constexpr (std::is_same_v<T, WeightedLq>) {
          rep.norm = weighted_lq_norm(rep.profile, s.beta);
        } else {
          rep.norm = weighted_lq_norm(rep.profile, s.beta);
          rep.decay = c0_beta_decay(rep.profile, s.beta, std::min(s.window, spec.horizon));
        }
      },
      spec.sequence_norm);
  return rep;
}

double approx_space_norm(const Element& x, const ApproxSpaceSpec& spec) {
  return approx_space_evaluate(x, spec).norm;
}

double family_bound(std::span<const Element> family, const ApproxSpaceSpec& spec) {
  detail::require(!family.empty(), "family_bound: family must be nonempty");
  double best = 0.0;
  for (const Element& x : family) best = std::max(best, approx_space_norm(x, spec));
  return best;
}

}  // namespace approxwidths
