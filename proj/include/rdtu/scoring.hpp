#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "rdtu/rdt.hpp"

namespace rdtu {

// Per-leaf scores.  A positive score predicts the positive class.

/// w+/n - 1/2.
double score_prob(LeafStats leaf);
/// (w+ + 1)/(n + 2) - 1/2; defined for n = 0.
double score_laplace(LeafStats leaf);
/// s_pos - s_neg of the leaf's uncertainty profile.
double score_plausibility(LeafStats leaf);
/// (1 - separation(w)) (w+/n - 1/2).
double score_cb(LeafStats leaf);

enum class Scorer { Prob, Laplace, Plausibility, ConfidenceBound };

inline constexpr Scorer kAllScorers[] = {Scorer::Prob, Scorer::Laplace, Scorer::Plausibility,
                                         Scorer::ConfidenceBound};

double score_leaf(Scorer scorer, LeafStats leaf);
std::string_view scorer_name(Scorer scorer);
std::optional<Scorer> parse_scorer(std::string_view name);

/// Arithmetic mean.
double aggregate_avg(std::span<const double> scores);
/// Mean of sign votes: +1 for a positive score, -1 for a negative one,
/// 0 (abstain) for exactly zero.
double aggregate_vote(std::span<const double> scores);

}  // namespace rdtu
