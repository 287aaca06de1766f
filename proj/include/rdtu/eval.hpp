#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdtu/combine.hpp"
#include "rdtu/data.hpp"

namespace rdtu {

enum class Metric { Auc, Accuracy };

std::string_view metric_name(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

/// Mann-Whitney AUC with midranks for tied scores.  Throws unless both
/// classes are present and the spans have equal length.
double auc(std::span<const double> scores, std::span<const Label> labels);

/// Fraction of correct sign predictions.  A score of exactly zero predicts
/// the training-majority class (positive iff prior_pos >= 0.5).
double accuracy(std::span<const double> scores, std::span<const Label> labels, double prior_pos);

struct FoldResult {
  std::string dataset;
  Method method = Method::ProbAvg;
  std::size_t min_leaf = 1;
  std::size_t repetition = 0;
  std::size_t fold = 0;  ///< index of the test fold
  double auc = 0;
  double accuracy = 0;
};

struct SkippedCell {
  std::string dataset;
  std::size_t min_leaf = 0;
  std::size_t repetition = 0;
  std::size_t fold = 0;
  std::string reason;
};

struct ExperimentConfig {
  std::size_t trees = 100;
  std::vector<std::size_t> leaf_sizes{1, 2, 3, 4, 8, 32};
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::uint64_t seed = 1;
  std::size_t repetitions = 5;
  double eva_smoothing = 0.1;
  /// Worker threads over grid cells; results do not depend on it.
  std::size_t jobs = 1;

  void validate() const;
};

struct DatasetInfo {
  std::string name;
  std::size_t instances = 0;
  std::size_t features = 0;
  double class_ratio = 0;
};

struct EvaluationReport {
  ExperimentConfig config;
  std::vector<DatasetInfo> datasets;
  std::vector<FoldResult> results;
  std::vector<SkippedCell> skipped;

  /// Orders results and skips by (dataset order, method, leaf size,
  /// repetition, fold).
  void sort_canonical();
};

/// Repeated two-fold cross-validation over the leaf-size grid.  One
/// ensemble per (dataset, repetition, fold, leaf size) serves every method.
/// Cells that cannot be evaluated are recorded in `skipped`.
EvaluationReport run_experiment(std::span<const Dataset> datasets, const ExperimentConfig& config);

struct RankEntry {
  Method method = Method::ProbAvg;
  std::size_t min_leaf = 1;
  double average_rank = 0;
};

/// Average rank of every (method, leaf size) cell across datasets.  Within
/// a dataset each cell's metric is its mean over folds, and rank 1 is best.
struct RankTable {
  Metric metric = Metric::Auc;
  std::vector<std::string> datasets;
  std::vector<RankEntry> entries;
  /// per_dataset[d][c] is the rank of entries[c] on datasets[d].
  std::vector<std::vector<double>> per_dataset;
};

/// Throws std::invalid_argument naming the missing cells when datasets do
/// not cover the same grid.
RankTable rank_table(std::span<const FoldResult> results, Metric metric);
inline RankTable rank_table(const EvaluationReport& report, Metric metric) {
  return rank_table(report.results, metric);
}

/// Midranks of `values`, rank 1 for the largest.
std::vector<double> descending_midranks(std::span<const double> values);

// Report files.  `echo` is a one-line JSON record of the run configuration
// written into every file.

/// Columns: dataset,method,min_leaf,repetition,fold,auc,accuracy, preceded
/// by a "# config: ..." comment line.
std::string results_csv(const EvaluationReport& report, std::string_view echo);
std::vector<FoldResult> parse_results_csv(std::string_view text);

std::string report_json(const EvaluationReport& report, std::string_view echo,
                        std::string_view results_file);
/// Reads a report JSON and the results CSV it names (relative to the JSON).
EvaluationReport read_report(const std::filesystem::path& json_path);

/// Columns: metric,method,min_leaf,average_rank,datasets.
std::string rank_csv(const RankTable& table, std::string_view echo);

}  // namespace rdtu
