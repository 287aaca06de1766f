#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rdtu {

enum class Label : std::uint8_t { Negative = 0, Positive = 1 };

struct NumericFeature {};
struct NominalFeature {
  std::vector<std::string> categories;
};

struct FeatureSpec {
  std::string name;
  std::variant<NumericFeature, NominalFeature> kind;

  bool is_nominal() const noexcept { return std::holds_alternative<NominalFeature>(kind); }
  /// Number of categories of a nominal feature; 0 for numeric features.
  std::size_t category_count() const noexcept;
};

/// Feature values are stored as doubles: the raw value for numeric features,
/// the category index for nominal ones.  NaN marks a missing value.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

struct Instance {
  std::vector<double> values;
  Label label = Label::Negative;
};

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
  std::size_t total() const noexcept { return pos + neg; }
};

struct Dataset {
  std::string name;
  std::vector<FeatureSpec> features;
  std::vector<Instance> instances;

  ClassCounts class_counts() const noexcept;
  ClassCounts class_counts(std::span<const std::size_t> rows) const noexcept;
  /// Fraction of positive instances.
  double class_ratio() const noexcept;

  /// Throws std::invalid_argument if any structural invariant is broken.
  void validate() const;
};

/// Checks that `values` is a well-formed row for `features`.
void validate_instance(std::span<const FeatureSpec> features, const Instance& inst);

struct LoadOptions {
  /// Label column by header name; takes precedence over label_index.
  std::optional<std::string> label_name;
  /// Label column by zero-based index.  Default: last column.
  std::optional<std::size_t> label_index;
  /// Columns forced to be nominal even if every value parses as a number.
  std::set<std::string> nominal_columns;
  /// Label value mapped to the positive class.  Default: the
  /// lexicographically greater of the two distinct values.
  std::optional<std::string> positive_label;
  /// Besides the empty field, this token marks a missing value.
  std::string missing_marker = "?";
};

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options = {});

/// Repeated two-fold cross-validation plan.  assignments[r][i] is the fold
/// (0 or 1) of instance i in repetition r.
struct SplitPlan {
  std::size_t repetitions = 5;
  std::size_t folds = 2;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint8_t>> assignments;

  /// Row indices belonging to `fold` in `repetition`, ascending.
  std::vector<std::size_t> rows_in(std::size_t repetition, std::size_t fold) const;
};

SplitPlan make_5x2(const Dataset& dataset, std::uint64_t seed, std::size_t repetitions = 5);

}  // namespace rdtu
