#pragma once

#include <cstdint>

#include "rdtu/data.hpp"
#include "rdtu/rdt.hpp"

namespace rdtu {

/// Degree of support for one class given the counts of a leaf:
///
///   pi(+|w) = sup_t min( (t/t^)^w+ ((1-t)/(1-t^))^w- , 2t - 1 ),  t^ = w+/n
///
/// and with 1 - 2t in place of 2t - 1 for the negative class.  A factor
/// whose exponent is zero is 1.  Requires n >= 1.
double plausibility(LeafStats leaf, Label cls);

/// Supports, uncertainties and preferences of a leaf.
///   u_e = min(pi_pos, pi_neg), u_a = 1 - max(pi_pos, pi_neg)
///   s_pos = pi_pos - pi_neg if pi_pos > pi_neg, half of 1 - u_a - u_e on a tie.
struct UncertaintyProfile {
  double pi_pos = 0;
  double pi_neg = 0;
  double u_e = 0;
  double u_a = 0;
  double s_pos = 0;
  double s_neg = 0;
};

/// Supports closer than this count as a tie.
inline constexpr double kTieTolerance = 1e-9;
/// Leaves with n up to this are served from a precomputed table.
inline constexpr std::uint32_t kProfileTableLimit = 64;

UncertaintyProfile profile(LeafStats leaf);
/// Uncached evaluation; profile() returns identical values.
UncertaintyProfile compute_profile(LeafStats leaf);

struct BetaBinomialSpec {
  std::uint32_t trials = 0;
  double alpha = 1;
  double beta = 1;

  /// trials = n, alpha = w+ + 1, beta = w- + 1.
  static BetaBinomialSpec from_leaf(LeafStats leaf);
};

/// C(n,k) B(k+alpha, n-k+beta) / B(alpha, beta), evaluated through lgamma.
double bb_pmf(const BetaBinomialSpec& spec, std::uint32_t k);

/// Height of the beta-binomial of a leaf at the midpoint n/2 (mean of the
/// two central values for odd n), relative to its maximum height.  1 for a
/// balanced leaf, shrinking as the leaf becomes purer or larger.
double separation(LeafStats leaf);
double compute_separation(LeafStats leaf);

}  // namespace rdtu
