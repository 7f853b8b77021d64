#pragma once

#include <optional>
#include <span>
#include <variant>

#include "approxwidths/schemes.hpp"
#include "approxwidths/sequences.hpp"

namespace approxwidths {

/// Lorentz l_{p,r}; with this S the approximation space is Pietsch's A_p^r.
/// E(x, A_0) sits at Lorentz index 1.
struct LorentzNorm {
  double p = 1.0;
  double r = 1.0;
};

/// l^q(beta).
struct WeightedLq {
  Weights beta;
};

/// l^q_0(beta): the l^q(beta) norm plus a finite c_0(beta) decay proxy.
struct WeightedLq0 {
  Weights beta;
  Index window = 8;
};

using SequenceNorm = std::variant<LorentzNorm, WeightedLq, WeightedLq0>;

struct ApproxSpaceSpec {
  Scheme scheme;
  SequenceNorm sequence_norm;
  Index horizon = 64;
};

struct ApproxNormReport {
  double norm = 0.0;
  VectorXd profile;  ///< E(x, A_0..A_horizon)
  Index horizon = 0;
  std::optional<DecayReport<double>> decay;  ///< present for l^q_0(beta)
};

/// (E(x, A_0), ..., E(x, A_horizon)).
VectorXd element_profile(const Element& x, const Scheme& s, Index horizon);

ApproxNormReport approx_space_evaluate(const Element& x, const ApproxSpaceSpec& spec);

/// ||x||_{A(X,S)} = ||(E(x, A_n))_n||_S truncated at the spec's horizon.
double approx_space_norm(const Element& x, const ApproxSpaceSpec& spec);

/// sup over the family of approx_space_norm.
double family_bound(std::span<const Element> family, const ApproxSpaceSpec& spec);

}  // namespace approxwidths
