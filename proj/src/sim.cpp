#include "rdtu/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "rdtu/seed.hpp"

namespace rdtu {

void SimConfig::validate() const {
  if (!(p_pos > 0 && p_pos < 1))
    throw std::invalid_argument(fmt::format("p_pos must lie in (0,1), got {}", p_pos));
  if (max_n < 1 || trials < 1 || ensemble_leaves < 1)
    throw std::invalid_argument("max_n, trials and ensemble_leaves must be at least 1");
  if (quantiles.empty()) throw std::invalid_argument("at least one quantile level is required");
  for (double q : quantiles)
    if (!(q > 0 && q < 1))
      throw std::invalid_argument(fmt::format("quantile level {} outside (0,1)", q));
  if (!(eva_smoothing > 0)) throw std::invalid_argument("eva smoothing must be positive");
}

double TrajectorySummary::standard_error(std::size_t step) const {
  const auto& s = steps.at(step - 1);
  return s.stddev / std::sqrt(static_cast<double>(trial_count));
}

double nearest_rank_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const auto n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

namespace {

// values[trial][step - 1] -> per-step summary.
TrajectorySummary summarize(std::string name, const SimConfig& cfg,
                            const std::vector<std::vector<double>>& values) {
  TrajectorySummary out;
  out.method = std::move(name);
  out.levels = cfg.quantiles;
  out.trial_count = values.size();
  std::vector<double> column(values.size());
  for (std::size_t s = 0; s < cfg.max_n; ++s) {
    for (std::size_t t = 0; t < values.size(); ++t) column[t] = values[t][s];
    TrajectoryStep step;
    step.step = s + 1;
    double sum = 0, abs_sum = 0;
    for (double v : column) {
      sum += v;
      abs_sum += std::abs(v);
    }
    step.mean = sum / static_cast<double>(column.size());
    step.mean_abs = abs_sum / static_cast<double>(column.size());
    double ss = 0;
    for (double v : column) ss += (v - step.mean) * (v - step.mean);
    step.stddev = column.size() > 1 ? std::sqrt(ss / static_cast<double>(column.size() - 1)) : 0.0;
    std::sort(column.begin(), column.end());
    for (double q : cfg.quantiles) step.quantiles.push_back(nearest_rank_quantile(column, q));
    out.steps.push_back(std::move(step));
  }
  return out;
}

template <typename TrialFn>
std::vector<std::vector<double>> run_trials(const SimConfig& cfg, TrialFn trial) {
  std::vector<std::vector<double>> values(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < cfg.trials; t = next++) values[t] = trial(t);
  };
  const std::size_t jobs = std::clamp<std::size_t>(cfg.jobs, 1, cfg.trials);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
  }
  return values;
}

}  // namespace

TrajectorySummary simulate_scorer(const SimConfig& cfg, Scorer scorer) {
  cfg.validate();
  auto values = run_trials(cfg, [&](std::size_t trial) {
    std::mt19937_64 rng(derive_seed(cfg.seed, {trial}));
    std::bernoulli_distribution draw(cfg.p_pos);
    LeafStats leaf;
    std::vector<double> out;
    out.reserve(cfg.max_n);
    for (std::size_t s = 0; s < cfg.max_n; ++s) {
      (draw(rng) ? leaf.pos : leaf.neg)++;
      out.push_back(score_leaf(scorer, leaf));
    }
    return out;
  });
  return summarize(std::string(scorer_name(scorer)), cfg, values);
}

TrajectorySummary simulate_combiner(const SimConfig& cfg, Method method) {
  cfg.validate();
  const CombineContext ctx{cfg.p_pos, cfg.eva_smoothing};
  auto values = run_trials(cfg, [&](std::size_t trial) {
    std::vector<std::mt19937_64> streams;
    streams.reserve(cfg.ensemble_leaves);
    for (std::size_t l = 0; l < cfg.ensemble_leaves; ++l)
      streams.emplace_back(derive_seed(cfg.seed, {trial, l}));
    std::bernoulli_distribution draw(cfg.p_pos);
    std::vector<LeafStats> leaves(cfg.ensemble_leaves);
    std::vector<double> out;
    out.reserve(cfg.max_n);
    for (std::size_t s = 0; s < cfg.max_n; ++s) {
      for (std::size_t l = 0; l < leaves.size(); ++l) (draw(streams[l]) ? leaves[l].pos : leaves[l].neg)++;
      out.push_back(combine(method, leaves, ctx));
    }
    return out;
  });
  return summarize(std::string(method_name(method)), cfg, values);
}

std::string quantile_column(double level) {
  return fmt::format("q{}", std::round(level * 1e6) / 1e4);
}

std::string trajectory_csv(const TrajectorySummary& summary, std::string_view echo) {
  std::string out = fmt::format("# config: {}\n", echo);
  out += "step,method,mean";
  for (double q : summary.levels) out += "," + quantile_column(q);
  out += '\n';
  for (const auto& s : summary.steps) {
    out += fmt::format("{},{},{}", s.step, summary.method, s.mean);
    for (double v : s.quantiles) out += fmt::format(",{}", v);
    out += '\n';
  }
  return out;
}

}  // namespace rdtu
