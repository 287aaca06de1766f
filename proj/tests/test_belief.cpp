#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "rdtu/belief.hpp"

using namespace rdtu;

namespace {

MassFunction random_mass(std::mt19937_64& rng, bool with_conflict = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v[4] = {with_conflict ? u(rng) : 0.0, u(rng), u(rng), kMassFloor + u(rng)};
  const double s = v[0] + v[1] + v[2] + v[3];
  return {v[0] / s, v[1] / s, v[2] / s, v[3] / s};
}

void check_close(const MassFunction& a, const MassFunction& b, double tol) {
  CHECK(std::abs(a.empty - b.empty) <= tol);
  CHECK(std::abs(a.pos - b.pos) <= tol);
  CHECK(std::abs(a.neg - b.neg) <= tol);
  CHECK(std::abs(a.omega - b.omega) <= tol);
}

const MassFunction kStrongPos{0, 0.8, 0, 0.2};
const MassFunction kStrongNeg{0, 0, 0.98, 0.02};

}  // namespace

TEST_CASE("dempster conflict scenario") {
  const std::vector<MassFunction> ms{kStrongPos, kStrongPos, kStrongNeg};
  const auto m = fold_dempster(ms);
  CHECK(m.empty == doctest::Approx(0.9408).epsilon(1e-12));
  CHECK(mass_to_score(m) == doctest::Approx(-0.02).epsilon(1e-12));
  CHECK(m.sum() == doctest::Approx(1.0));
}

TEST_CASE("cautious conflict scenario") {
  const std::vector<MassFunction> ms{kStrongPos, kStrongPos, kStrongNeg};
  const auto m = fold_cautious(ms);
  CHECK(m.empty == doctest::Approx(0.784).epsilon(1e-12));
  CHECK(m.pos == doctest::Approx(0.016).epsilon(1e-12));
  CHECK(m.neg == doctest::Approx(0.196).epsilon(1e-12));
  CHECK(m.omega == doctest::Approx(0.004).epsilon(1e-12));
  CHECK(mass_to_score(m) == doctest::Approx(-0.18).epsilon(1e-12));
}

TEST_CASE("two agreeing sources: dempster reinforces, cautious ties") {
  const MassFunction pos{0, 0.4, 0, 0.6};
  const MassFunction neg{0, 0, 0.4, 0.6};
  const std::vector<MassFunction> ms{pos, pos, neg};
  CHECK(mass_to_score(fold_dempster(ms)) > 0);
  CHECK(mass_to_score(fold_dempster(ms)) == doctest::Approx(0.24));
  CHECK(std::abs(mass_to_score(fold_cautious(ms))) <= 1e-9);
}

TEST_CASE("dempster matches the subset oracle") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_mass(rng);
    const auto b = random_mass(rng);
    check_close(dempster_pair(a, b),
                oracle::from_subsets(oracle::conjunctive(oracle::to_subsets(a), oracle::to_subsets(b))),
                1e-15);
  }
}

TEST_CASE("weights match the general canonical decomposition") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_mass(rng);
    const auto w = weights_of(m);
    const auto ref = oracle::canonical_weights(oracle::to_subsets(m));
    CHECK(w.empty == doctest::Approx(ref[0]).epsilon(1e-10));
    CHECK(w.pos == doctest::Approx(ref[1]).epsilon(1e-10));
    CHECK(w.neg == doctest::Approx(ref[2]).epsilon(1e-10));
    check_close(mass_of(w), oracle::from_subsets(oracle::from_weights(ref)), 1e-10);
  }
}

TEST_CASE("weights_of and mass_of are inverse") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_mass(rng);
    check_close(mass_of(weights_of(m)), m, 1e-9);
    const auto w = weights_of(m);
    const auto back = weights_of(mass_of(w));
    CHECK(back.pos == doctest::Approx(w.pos).epsilon(1e-9));
    CHECK(back.neg == doctest::Approx(w.neg).epsilon(1e-9));
    CHECK(back.empty == doctest::Approx(w.empty).epsilon(1e-9));
  }
  CHECK_THROWS(weights_of({0, 0.5, 0.5, 0}));
  CHECK_THROWS(mass_of({0.2, 0.2, 5.0}));
}

TEST_CASE("rule algebra on random triples") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_mass(rng);
    const auto b = random_mass(rng);
    const auto c = random_mass(rng);
    check_close(dempster_pair(a, b), dempster_pair(b, a), 1e-12);
    check_close(dempster_pair(dempster_pair(a, b), c), dempster_pair(a, dempster_pair(b, c)), 1e-12);
    check_close(dempster_pair(a, MassFunction::vacuous()), a, 1e-15);
    CHECK(dempster_pair(dempster_pair(a, b), c).sum() == doctest::Approx(1.0).epsilon(1e-9));

    const auto wa = weights_of(a), wb = weights_of(b), wc = weights_of(c);
    const auto l = cautious_pair(cautious_pair(wa, wb), wc);
    const auto r = cautious_pair(wa, cautious_pair(wb, wc));
    CHECK(l.pos == r.pos);
    CHECK(l.neg == r.neg);
    CHECK(l.empty == r.empty);
    const auto ab = cautious_pair(wa, wb), ba = cautious_pair(wb, wa);
    CHECK(ab.pos == ba.pos);
    CHECK(ab.empty == ba.empty);
    const auto aa = cautious_pair(wa, wa);
    CHECK(aa.pos == wa.pos);
    CHECK(aa.neg == wa.neg);
    CHECK(aa.empty == wa.empty);

    const std::vector<MassFunction> abc{a, b, c}, cab{c, a, b};
    check_close(fold_cautious(abc), fold_cautious(cab), 1e-12);
    check_close(fold_dempster(abc), fold_dempster(cab), 1e-12);
    const std::vector<MassFunction> twice{a, a};
    check_close(fold_cautious(twice), a, 1e-9);
  }
}

TEST_CASE("leaf masses are floored and closed") {
  for (std::uint32_t n = 1; n <= 64; ++n)
    for (std::uint32_t p = 0; p <= n; ++p) {
      const auto m = mass_from_leaf({p, n - p});
      CHECK_NOTHROW(m.validate());
      CHECK(m.empty == 0.0);
      CHECK(m.pos >= kMassFloor);
      CHECK(m.neg >= kMassFloor);
      CHECK(m.omega >= kMassFloor);
    }
  const auto pure = mass_from_leaf({9, 0});
  CHECK(pure.neg == kMassFloor);
  CHECK(pure.pos > pure.omega);
}

TEST_CASE("folds need input; one mass passes through") {
  CHECK_THROWS(fold_dempster(std::vector<MassFunction>{}));
  CHECK_THROWS(fold_cautious(std::vector<MassFunction>{}));
  const std::vector<MassFunction> one{kStrongNeg};
  check_close(fold_cautious(one), kStrongNeg, 0);
  check_close(fold_dempster(one), kStrongNeg, 0);
}
