// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "oracles.hpp"
#include "rdtu/belief.hpp"
#include "rdtu/combine.hpp"
#include "rdtu/data.hpp"
#include "rdtu/eval.hpp"
#include "rdtu/scoring.hpp"
#include "rdtu/sim.hpp"
#include "rdtu/uncertainty.hpp"

using namespace rdtu;

namespace {

int failures = 0;

void report(std::string_view name, bool ok, const std::string& detail) {
  fmt::print("{}  {:<32} {}\n", ok ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
  if (!ok) ++failures;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

int sign(double x) { return (x > 0) - (x < 0); }

const MassFunction kPos08{0, 0.8, 0, 0.2};
const MassFunction kNeg098{0, 0, 0.98, 0.02};

void dempster_scenario() {
  const std::vector<MassFunction> ms{kPos08, kPos08, kNeg098};
  const auto m = fold_dempster(ms);
  const double score = mass_to_score(m);
  report("dempster conflict scenario", near(m.empty, 0.9408, 1e-6) && near(score, -0.02, 1e-6),
         fmt::format("m(empty)={:.6f} score={:+.6f}", m.empty, score));
}

void cautious_scenario() {
  const std::vector<MassFunction> ms{kPos08, kPos08, kNeg098};
  const auto m = fold_cautious(ms);
  const double score = mass_to_score(m);
  const bool rounded = near(m.empty, 0.78, 0.03) && near(std::abs(score), 0.20, 0.03) && score < 0;
  const bool closed = near(m.empty, 0.784, 1e-6) && near(score, -0.18, 1e-6);
  report("cautious conflict scenario", rounded && closed,
         fmt::format("m(empty)={:.6f} score={:+.6f}", m.empty, score));
}

void agreeing_sources_scenario() {
  const std::vector<MassFunction> ms{{0, 0.4, 0, 0.6}, {0, 0.4, 0, 0.6}, {0, 0, 0.4, 0.6}};
  const double d = mass_to_score(fold_dempster(ms));
  const double c = mass_to_score(fold_cautious(ms));
  report("two-against-one scenario", d > 0 && std::abs(c) <= 1e-9,
         fmt::format("dempster={:+.6f} cautious={:+.2e}", d, c));
}

void worked_example() {
  const std::vector<LeafStats> leaves{{4, 0}, {10, 40}};
  const double s = combine(Method::ProbAvg, leaves, {});
  report("prob-avg worked example", s == 0.1 && s + 0.5 == 0.6, fmt::format("score={}", s));
}

void sign_sweep() {
  std::size_t leaves = 0;
  std::size_t disagreements = 0;
  double worst = 0;
  for (std::uint32_t n = 1; n <= 64; ++n)
    for (std::uint32_t p = 0; p <= n; ++p) {
      const LeafStats w{p, n - p};
      ++leaves;
      const int s = sign(score_prob(w));
      for (auto sc : kAllScorers) disagreements += sign(score_leaf(sc, w)) != s;
      for (auto cls : {Label::Positive, Label::Negative})
        worst = std::max(worst, std::abs(plausibility(w, cls) - oracle::grid_plausibility(w, cls)));
    }
  report("sign agreement and solver oracle", disagreements == 0 && worst <= 1e-4,
         fmt::format("{} leaves, {} sign disagreements, max |solver-grid|={:.2e}", leaves,
                     disagreements, worst));
}

MassFunction random_mass(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v[4] = {u(rng), u(rng), u(rng), kMassFloor + u(rng)};
  const double s = v[0] + v[1] + v[2] + v[3];
  return {v[0] / s, v[1] / s, v[2] / s, v[3] / s};
}

double max_diff(const MassFunction& a, const MassFunction& b) {
  return std::max({std::abs(a.empty - b.empty), std::abs(a.pos - b.pos), std::abs(a.neg - b.neg),
                   std::abs(a.omega - b.omega)});
}

void belief_algebra() {
  std::mt19937_64 rng(20240601);
  double round_trip = 0, dempster = 0, cautious = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_mass(rng), b = random_mass(rng), c = random_mass(rng);
    round_trip = std::max(round_trip, max_diff(mass_of(weights_of(a)), a));
    dempster = std::max({dempster, max_diff(dempster_pair(a, b), dempster_pair(b, a)),
                         max_diff(dempster_pair(dempster_pair(a, b), c), dempster_pair(a, dempster_pair(b, c)))});
    const auto wa = weights_of(a), wb = weights_of(b), wc = weights_of(c);
    auto as_mass = [](const WeightFunction& w) { return mass_of(w); };
    cautious = std::max({cautious, max_diff(as_mass(cautious_pair(wa, wb)), as_mass(cautious_pair(wb, wa))),
                         max_diff(as_mass(cautious_pair(cautious_pair(wa, wb), wc)),
                                  as_mass(cautious_pair(wa, cautious_pair(wb, wc)))),
                         max_diff(as_mass(cautious_pair(wa, wa)), as_mass(wa))});
  }
  report("belief algebra", round_trip <= 1e-9 && dempster <= 1e-12 && cautious <= 1e-12,
         fmt::format("round trip {:.1e}, dempster {:.1e}, cautious {:.1e}", round_trip, dempster, cautious));
}

void auc_oracle() {
  std::mt19937_64 rng(7);
  int mismatches = 0;
  std::size_t tied = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + rng() % 199;
    const int distinct = 1 + static_cast<int>(rng() % 20);
    std::vector<double> s(n);
    std::vector<Label> y(n);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = static_cast<double>(rng() % distinct) / distinct;
      y[j] = rng() % 2 ? Label::Positive : Label::Negative;
    }
    y[0] = Label::Positive;
    y[1] = Label::Negative;
    tied += static_cast<std::size_t>(distinct) < n;
    mismatches += auc(s, y) != oracle::pair_count_auc(s, y);
  }
  report("auc against pair counting", mismatches == 0,
         fmt::format("1000 samples ({} with ties), {} mismatches", tied, mismatches));
}

void leaf_trajectories() {
  SimConfig cfg;
  const auto prob = simulate_scorer(cfg, Scorer::Prob);
  const auto lap = simulate_scorer(cfg, Scorer::Laplace);
  const auto& last = prob.steps.back();
  const double se = prob.standard_error(cfg.max_n);
  const bool converged = std::abs(last.mean - 0.25) <= 3 * se;
  bool close = true;
  for (std::size_t i = 0; i < cfg.max_n; ++i)
    close = close && std::abs(prob.steps[i].mean - lap.steps[i].mean) <= 1.0 / (prob.steps[i].step + 2);
  auto band = [](const TrajectoryStep& s) { return s.quantiles.back() - s.quantiles.front(); };
  const bool narrower = band(lap.steps.front()) < band(prob.steps.front());
  report("single-leaf trajectories", converged && close && narrower,
         fmt::format("mean@100={:.4f} (3se={:.4f}), laplace within 1/(n+2): {}, band@1 {:.3f} < {:.3f}",
                     last.mean, 3 * se, close, band(lap.steps.front()), band(prob.steps.front())));
}

void eva_trend() {
  SimConfig cfg;
  cfg.max_n = 32;
  const auto eva = simulate_combiner(cfg, Method::Eva);
  const double at4 = eva.steps[3].mean_abs;
  const double at32 = eva.steps[31].mean_abs;
  report("eva absolute score shrinks", at32 < at4,
         fmt::format("mean |score| at 4 = {:.4f}, at 32 = {:.4f}", at4, at32));
}

bool valid_tie_permutation(std::vector<double> ranks) {
  std::sort(ranks.begin(), ranks.end());
  for (std::size_t i = 0; i < ranks.size();) {
    std::size_t j = i;
    while (j < ranks.size() && ranks[j] == ranks[i]) ++j;
    if (ranks[i] != 0.5 * static_cast<double>(i + 1 + j)) return false;
    i = j;
  }
  return true;
}

void end_to_end() {
  const std::filesystem::path dir = RDTU_DATA_DIR;
  const std::vector<Dataset> data{load_csv(dir / "tic-tac-toe.csv"), load_csv(dir / "breast-cancer.csv")};
  ExperimentConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  const auto serial = run_experiment(data, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  cfg.jobs = std::max(2u, std::thread::hardware_concurrency());
  const auto parallel = run_experiment(data, cfg);
  const bool deterministic = results_csv(serial, "{}") == results_csv(parallel, "{}");

  std::map<std::string, std::size_t> rows;
  for (const auto& r : serial.results) ++rows[r.dataset];
  bool complete = serial.skipped.empty() && rows.size() == data.size();
  for (const auto& [name, count] : rows) complete = complete && count == 9 * 6 * 10;

  bool ranks_ok = true;
  for (auto metric : {Metric::Auc, Metric::Accuracy}) {
    const auto table = rank_table(serial, metric);
    ranks_ok = ranks_ok && table.entries.size() == 54 && table.datasets.size() == data.size();
    for (const auto& per : table.per_dataset) ranks_ok = ranks_ok && valid_tie_permutation(per);
  }
  report("end-to-end grid", seconds < 300 && deterministic && complete && ranks_ok,
         fmt::format("{:.1f}s on one thread, rows {}/{}, deterministic {}, ranks valid {}", seconds,
                     rows["tic-tac-toe"], rows["breast-cancer"], deterministic, ranks_ok));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, void (*)()>> checks{
      {"dempster", dempster_scenario}, {"cautious", cautious_scenario},
      {"agree", agreeing_sources_scenario}, {"example", worked_example},
      {"sweep", sign_sweep}, {"algebra", belief_algebra},
      {"auc", auc_oracle}, {"leaf-sim", leaf_trajectories},
      {"eva-sim", eva_trend}, {"e2e", end_to_end}};
  for (const auto& [name, fn] : checks) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, fmt::format("threw: {}", e.what()));
    }
  }
  fmt::print("{} of {} criteria passed\n", checks.size() - failures, checks.size());
  return failures == 0 ? 0 : 1;
}
