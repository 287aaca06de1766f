#pragma once

#include <span>

#include "rdtu/rdt.hpp"

namespace rdtu {

/// Mass function on the frame {+, -}.
struct MassFunction {
  double empty = 0;  ///< m(∅), conflict
  double pos = 0;    ///< m({+})
  double neg = 0;    ///< m({-})
  double omega = 1;  ///< m({+,-}), ignorance

  static constexpr MassFunction vacuous() { return {0, 0, 0, 1}; }
  double sum() const noexcept { return empty + pos + neg + omega; }
  /// Throws std::invalid_argument unless all masses are >= 0 and sum to 1.
  void validate(double tol = 1e-9) const;
};

/// Weights of the canonical conjunctive decomposition
/// m = {+}^w_pos ∩ {-}^w_neg ∩ ∅^w_empty.
struct WeightFunction {
  double pos = 1;
  double neg = 1;
  double empty = 1;

  static constexpr WeightFunction vacuous() { return {1, 1, 1}; }
};

/// Floor applied to the singleton and Ω masses of a leaf.
inline constexpr double kMassFloor = 1e-5;

/// m({+}) = s_pos, m({-}) = s_neg, m(Ω) = u_e + u_a, each floored at
/// kMassFloor; the excess created by flooring is taken from the largest
/// of the three so the masses still sum to 1 and m(∅) stays 0.
MassFunction mass_from_leaf(LeafStats leaf);

/// Unnormalized Dempster (conjunctive) rule.
MassFunction dempster_pair(const MassFunction& a, const MassFunction& b);

/// Requires m(Ω) > 0.
WeightFunction weights_of(const MassFunction& m);
/// Componentwise minimum of weights (the cautious rule).
WeightFunction cautious_pair(const WeightFunction& a, const WeightFunction& b);
/// Inverse of weights_of.  Throws if a recovered mass is below -1e-9;
/// smaller negative rounding residue is clamped to 0.
MassFunction mass_of(const WeightFunction& w);

/// m({+}) - m({-}).
double mass_to_score(const MassFunction& m);

/// m_1 ∩ (m_2 ∩ (... ∩ m_K)).  Requires at least one mass.
MassFunction fold_dempster(std::span<const MassFunction> masses);
/// m_1 ∧ (m_2 ∧ (... ∧ m_K)), combined in weight space.
MassFunction fold_cautious(std::span<const MassFunction> masses);

}  // namespace rdtu
