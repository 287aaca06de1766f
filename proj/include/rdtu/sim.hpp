#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdtu/combine.hpp"
#include "rdtu/scoring.hpp"

namespace rdtu {

/// Bernoulli leaf-growth simulation.  A leaf starts empty and gains one
/// sample per step, positive with probability p_pos.
struct SimConfig {
  double p_pos = 0.75;
  std::size_t max_n = 100;
  std::size_t trials = 100;
  /// Leaves per simulated ensemble when simulating a combination method.
  std::size_t ensemble_leaves = 100;
  std::uint64_t seed = 1;
  std::vector<double> quantiles{0.10, 0.25, 0.75, 0.90};
  double eva_smoothing = 0.1;
  std::size_t jobs = 1;

  void validate() const;
};

struct TrajectoryStep {
  std::size_t step = 0;
  double mean = 0;
  double mean_abs = 0;  ///< mean of |score|, not written to CSV
  double stddev = 0;  ///< sample standard deviation over trials
  std::vector<double> quantiles;  ///< aligned with TrajectorySummary::levels
};

struct TrajectorySummary {
  std::string method;
  std::vector<double> levels;
  std::vector<TrajectoryStep> steps;  ///< steps 1..max_n
  std::size_t trial_count = 0;

  /// Standard error of the mean at `step` (1-based).
  double standard_error(std::size_t step) const;
};

/// Nearest-rank empirical quantile of sorted data: the ceil(q N)-th value.
double nearest_rank_quantile(std::span<const double> sorted, double q);

/// One leaf per trial, scored after every sample.
TrajectorySummary simulate_scorer(const SimConfig& cfg, Scorer scorer);

/// One ensemble of `ensemble_leaves` independent leaves per trial; all
/// leaves gain a sample per step and the method combines them, with the
/// Bernoulli rate as the class prior.
TrajectorySummary simulate_combiner(const SimConfig& cfg, Method method);

/// Column name for a quantile level, e.g. 0.1 -> "q10", 0.025 -> "q2.5".
std::string quantile_column(double level);

/// Columns: step,method,mean,q.. (one per level), after a "# config:" line.
std::string trajectory_csv(const TrajectorySummary& summary, std::string_view echo);

}  // namespace rdtu
