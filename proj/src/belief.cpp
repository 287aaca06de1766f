#include "rdtu/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "rdtu/uncertainty.hpp"

namespace rdtu {

void MassFunction::validate(double tol) const {
  if (empty < 0 || pos < 0 || neg < 0 || omega < 0 || std::abs(sum() - 1.0) > tol)
    throw std::invalid_argument(
        fmt::format("invalid mass function (∅:{}, +:{}, -:{}, Ω:{})", empty, pos, neg, omega));
}

MassFunction mass_from_leaf(LeafStats leaf) {
  const auto p = profile(leaf);
  double m[3] = {std::max(p.s_pos, kMassFloor), std::max(p.s_neg, kMassFloor),
                 std::max(p.u_e + p.u_a, kMassFloor)};
  const double excess = m[0] + m[1] + m[2] - 1.0;
  if (excess > 0) *std::max_element(std::begin(m), std::end(m)) -= excess;
  return {std::max(0.0, -excess), m[0], m[1], m[2]};
}

MassFunction dempster_pair(const MassFunction& a, const MassFunction& b) {
  MassFunction r;
  r.omega = a.omega * b.omega;
  r.pos = a.pos * b.pos + a.pos * b.omega + a.omega * b.pos;
  r.neg = a.neg * b.neg + a.neg * b.omega + a.omega * b.neg;
  r.empty = a.empty * (b.empty + b.pos + b.neg + b.omega) + b.empty * (a.pos + a.neg + a.omega) +
            a.pos * b.neg + a.neg * b.pos;
  return r;
}

WeightFunction weights_of(const MassFunction& m) {
  if (!(m.omega > 0))
    throw std::invalid_argument("weights_of needs m(Ω) > 0 (dogmatic mass function)");
  // Commonalities; Q(∅) = 1.
  const double q_pos = m.pos + m.omega;
  const double q_neg = m.neg + m.omega;
  const double q_omega = m.omega;
  return {q_omega / q_pos, q_omega / q_neg, q_pos * q_neg / q_omega};
}

WeightFunction cautious_pair(const WeightFunction& a, const WeightFunction& b) {
  return {std::min(a.pos, b.pos), std::min(a.neg, b.neg), std::min(a.empty, b.empty)};
}

MassFunction mass_of(const WeightFunction& w) {
  const double q_pos = w.empty * w.neg;
  const double q_neg = w.empty * w.pos;
  const double q_omega = w.empty * w.pos * w.neg;
  MassFunction m{1.0 - q_pos - q_neg + q_omega, q_pos - q_omega, q_neg - q_omega, q_omega};
  for (double* v : {&m.empty, &m.pos, &m.neg, &m.omega}) {
    if (*v < -1e-9)
      throw std::invalid_argument(fmt::format(
          "weights (+:{}, -:{}, ∅:{}) do not decompose a mass function", w.pos, w.neg, w.empty));
    *v = std::max(*v, 0.0);
  }
  return m;
}

double mass_to_score(const MassFunction& m) { return m.pos - m.neg; }

MassFunction fold_dempster(std::span<const MassFunction> masses) {
  if (masses.empty()) throw std::invalid_argument("nothing to combine");
  MassFunction acc = masses.back();
  for (auto it = masses.rbegin() + 1; it != masses.rend(); ++it) acc = dempster_pair(*it, acc);
  return acc;
}

MassFunction fold_cautious(std::span<const MassFunction> masses) {
  if (masses.empty()) throw std::invalid_argument("nothing to combine");
  if (masses.size() == 1) return masses.front();
  WeightFunction acc = weights_of(masses.back());
  for (auto it = masses.rbegin() + 1; it != masses.rend(); ++it)
    acc = cautious_pair(weights_of(*it), acc);
  return mass_of(acc);
}

}  // namespace rdtu
