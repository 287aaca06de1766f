#include "rdtu/scoring.hpp"

#include <numeric>
#include <stdexcept>

#include "rdtu/uncertainty.hpp"

namespace rdtu {

namespace {

double positive_fraction(LeafStats leaf) {
  if (leaf.total() == 0) throw std::invalid_argument("leaf statistics with n = 0");
  return static_cast<double>(leaf.pos) / leaf.total();
}

void require_scores(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("cannot aggregate an empty score vector");
}

}  // namespace

double score_prob(LeafStats leaf) { return positive_fraction(leaf) - 0.5; }

double score_laplace(LeafStats leaf) { return (leaf.pos + 1.0) / (leaf.total() + 2.0) - 0.5; }

double score_plausibility(LeafStats leaf) {
  const auto p = profile(leaf);
  return p.s_pos - p.s_neg;
}

double score_cb(LeafStats leaf) { return (1.0 - separation(leaf)) * (positive_fraction(leaf) - 0.5); }

double score_leaf(Scorer scorer, LeafStats leaf) {
  switch (scorer) {
    case Scorer::Prob: return score_prob(leaf);
    case Scorer::Laplace: return score_laplace(leaf);
    case Scorer::Plausibility: return score_plausibility(leaf);
    case Scorer::ConfidenceBound: return score_cb(leaf);
  }
  throw std::invalid_argument("unknown scorer");
}

std::string_view scorer_name(Scorer scorer) {
  switch (scorer) {
    case Scorer::Prob: return "prob";
    case Scorer::Laplace: return "laplace";
    case Scorer::Plausibility: return "pls";
    case Scorer::ConfidenceBound: return "cb";
  }
  return "?";
}

std::optional<Scorer> parse_scorer(std::string_view name) {
  for (auto s : kAllScorers)
    if (scorer_name(s) == name) return s;
  return std::nullopt;
}

double aggregate_avg(std::span<const double> scores) {
  require_scores(scores);
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

double aggregate_vote(std::span<const double> scores) {
  require_scores(scores);
  long long votes = 0;
  for (double s : scores) votes += (s > 0) - (s < 0);
  return static_cast<double>(votes) / static_cast<double>(scores.size());
}

}  // namespace rdtu
