#include "rdtu/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace rdtu {

namespace {

void require_nonempty(LeafStats leaf) {
  if (leaf.total() == 0) throw std::invalid_argument("leaf statistics with n = 0");
}

// log of the normalized likelihood (t/t^)^a ((1-t)/(1-t^))^b.
double log_likelihood_ratio(double t, std::uint32_t a, std::uint32_t b) {
  const double n = static_cast<double>(a) + b;
  double out = 0;
  if (a > 0) out += a * (std::log(t) - std::log(a / n));
  if (b > 0) out += b * (std::log1p(-t) - std::log(b / n));
  return out;
}

// pi(+|[a,b]).  On [max(t^, 1/2), 1] the likelihood falls from >= 2t-1 to
// L(1) while 2t-1 rises to 1, so the supremum sits at their single crossing.
double support_positive(std::uint32_t a, std::uint32_t b) {
  if (b == 0) return 1.0;
  const double n = static_cast<double>(a) + b;
  double lo = std::max(a / n, 0.5);
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = 2 * mid - 1;
    if (std::exp(log_likelihood_ratio(mid, a, b)) >= g)
      lo = mid;
    else
      hi = mid;
  }
  return 2 * (0.5 * (lo + hi)) - 1;
}

struct ProfileTable {
  std::vector<UncertaintyProfile> profiles;
  std::vector<double> separations;

  static std::size_t index(LeafStats w) {
    return static_cast<std::size_t>(w.pos) * (kProfileTableLimit + 1) + w.neg;
  }

  ProfileTable() {
    const std::size_t side = kProfileTableLimit + 1;
    profiles.resize(side * side);
    separations.resize(side * side);
    for (std::uint32_t a = 0; a <= kProfileTableLimit; ++a)
      for (std::uint32_t b = 0; a + b <= kProfileTableLimit; ++b) {
        if (a + b == 0) continue;
        profiles[index({a, b})] = compute_profile({a, b});
        separations[index({a, b})] = compute_separation({a, b});
      }
  }
};

const ProfileTable& table() {
  static const ProfileTable t;
  return t;
}

}  // namespace

double plausibility(LeafStats leaf, Label cls) {
  require_nonempty(leaf);
  return cls == Label::Positive ? support_positive(leaf.pos, leaf.neg)
                                : support_positive(leaf.neg, leaf.pos);
}

UncertaintyProfile compute_profile(LeafStats leaf) {
  UncertaintyProfile p;
  p.pi_pos = plausibility(leaf, Label::Positive);
  p.pi_neg = plausibility(leaf, Label::Negative);
  p.u_e = std::min(p.pi_pos, p.pi_neg);
  p.u_a = 1.0 - std::max(p.pi_pos, p.pi_neg);
  const double committed = 1.0 - (p.u_a + p.u_e);
  if (std::abs(p.pi_pos - p.pi_neg) <= kTieTolerance) {
    p.s_pos = p.s_neg = committed / 2;
  } else if (p.pi_pos > p.pi_neg) {
    p.s_pos = committed;
  } else {
    p.s_neg = committed;
  }
  return p;
}

UncertaintyProfile profile(LeafStats leaf) {
  require_nonempty(leaf);
  if (leaf.total() <= kProfileTableLimit) return table().profiles[ProfileTable::index(leaf)];
  return compute_profile(leaf);
}

BetaBinomialSpec BetaBinomialSpec::from_leaf(LeafStats leaf) {
  return {leaf.total(), leaf.pos + 1.0, leaf.neg + 1.0};
}

double bb_pmf(const BetaBinomialSpec& spec, std::uint32_t k) {
  if (k > spec.trials)
    throw std::invalid_argument(fmt::format("k = {} outside 0..{}", k, spec.trials));
  if (!(spec.alpha > 0 && spec.beta > 0))
    throw std::invalid_argument("beta-binomial shape parameters must be positive");
  const double n = spec.trials;
  const double kk = k;
  auto lbeta = [](double x, double y) { return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y); };
  const double lchoose = std::lgamma(n + 1) - std::lgamma(kk + 1) - std::lgamma(n - kk + 1);
  return std::exp(lchoose + lbeta(kk + spec.alpha, n - kk + spec.beta) - lbeta(spec.alpha, spec.beta));
}

double compute_separation(LeafStats leaf) {
  require_nonempty(leaf);
  const auto spec = BetaBinomialSpec::from_leaf(leaf);
  const std::uint32_t n = spec.trials;
  double peak = 0;
  for (std::uint32_t k = 0; k <= n; ++k) peak = std::max(peak, bb_pmf(spec, k));
  const double mid = n % 2 == 0 ? bb_pmf(spec, n / 2)
                                : 0.5 * (bb_pmf(spec, n / 2) + bb_pmf(spec, n / 2 + 1));
  return mid / peak;
}

double separation(LeafStats leaf) {
  require_nonempty(leaf);
  if (leaf.total() <= kProfileTableLimit) return table().separations[ProfileTable::index(leaf)];
  return compute_separation(leaf);
}

}  // namespace rdtu
