#include "rdtu/combine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "rdtu/belief.hpp"
#include "rdtu/scoring.hpp"

namespace rdtu {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::ProbAvg: return "prob";
    case Method::LaplaceAvg: return "laplace";
    case Method::PlsAvg: return "pls";
    case Method::CbAvg: return "cb";
    case Method::Vote: return "vote";
    case Method::Pool: return "pool";
    case Method::Dempster: return "dempster";
    case Method::Cautious: return "cautious";
    case Method::Eva: return "eva";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : kAllMethods)
    if (method_name(m) == name) return m;
  return std::nullopt;
}

std::vector<Method> parse_method_list(std::string_view csv) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    const auto token = csv.substr(start, end - start);
    if (!token.empty()) {
      const auto m = parse_method(token);
      if (!m) throw std::invalid_argument(fmt::format("unknown method '{}'", token));
      out.push_back(*m);
    }
    start = end + 1;
  }
  return out;
}

void CombineContext::validate() const {
  if (!(prior_pos > 0 && prior_pos < 1))
    throw std::invalid_argument(fmt::format("prior_pos must lie in (0,1), got {}", prior_pos));
  if (!(eva_smoothing > 0))
    throw std::invalid_argument(fmt::format("eva smoothing must be positive, got {}", eva_smoothing));
}

double pool(std::span<const LeafStats> leaves) {
  if (leaves.empty()) throw std::invalid_argument("cannot pool zero leaves");
  double pos = 0, total = 0;
  for (const auto& w : leaves) {
    pos += w.pos;
    total += w.total();
  }
  if (total == 0) throw std::invalid_argument("cannot pool leaves that are all empty");
  return pos / total - 0.5;
}

double eva(std::span<const LeafStats> leaves, const CombineContext& ctx) {
  if (leaves.empty()) throw std::invalid_argument("eva needs at least one leaf");
  ctx.validate();
  const double s = ctx.eva_smoothing;
  const double log_prior_pos = std::log(ctx.prior_pos);
  const double log_prior_neg = std::log1p(-ctx.prior_pos);
  double log_a = log_prior_pos;
  double log_b = log_prior_neg;
  for (const auto& w : leaves) {
    if (w.total() == 0) throw std::invalid_argument("eva leaf with n = 0");
    const double denom = w.total() + 2 * s;
    log_a += std::log((w.pos + s) / denom) - log_prior_pos;
    log_b += std::log((w.neg + s) / denom) - log_prior_neg;
  }
  return std::tanh(0.5 * (log_a - log_b));
}

namespace {

std::vector<double> leaf_scores(Scorer scorer, std::span<const LeafStats> leaves) {
  std::vector<double> scores;
  scores.reserve(leaves.size());
  for (const auto& w : leaves) scores.push_back(score_leaf(scorer, w));
  return scores;
}

std::vector<MassFunction> leaf_masses(std::span<const LeafStats> leaves) {
  if (leaves.empty()) throw std::invalid_argument("cannot combine zero leaves");
  std::vector<MassFunction> out;
  out.reserve(leaves.size());
  for (const auto& w : leaves) out.push_back(mass_from_leaf(w));
  return out;
}

}  // namespace

double combine(Method method, std::span<const LeafStats> leaves, const CombineContext& ctx) {
  switch (method) {
    case Method::ProbAvg: return aggregate_avg(leaf_scores(Scorer::Prob, leaves));
    case Method::LaplaceAvg: return aggregate_avg(leaf_scores(Scorer::Laplace, leaves));
    case Method::PlsAvg: return aggregate_avg(leaf_scores(Scorer::Plausibility, leaves));
    case Method::CbAvg: return aggregate_avg(leaf_scores(Scorer::ConfidenceBound, leaves));
    // Every scorer changes sign with w+ - w-, so prob's sign stands for all.
    case Method::Vote: return aggregate_vote(leaf_scores(Scorer::Prob, leaves));
    case Method::Pool: return pool(leaves);
    case Method::Dempster: return mass_to_score(fold_dempster(leaf_masses(leaves)));
    case Method::Cautious: return mass_to_score(fold_cautious(leaf_masses(leaves)));
    case Method::Eva: return eva(leaves, ctx);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace rdtu
