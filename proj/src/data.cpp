#include "rdtu/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

#include "csv.hpp"
#include "rdtu/seed.hpp"

namespace rdtu {

std::size_t FeatureSpec::category_count() const noexcept {
  if (const auto* nom = std::get_if<NominalFeature>(&kind)) return nom->categories.size();
  return 0;
}

ClassCounts Dataset::class_counts() const noexcept {
  ClassCounts c;
  for (const auto& inst : instances) (inst.label == Label::Positive ? c.pos : c.neg)++;
  return c;
}

ClassCounts Dataset::class_counts(std::span<const std::size_t> rows) const noexcept {
  ClassCounts c;
  for (auto r : rows) (instances[r].label == Label::Positive ? c.pos : c.neg)++;
  return c;
}

double Dataset::class_ratio() const noexcept {
  const auto c = class_counts();
  return c.total() == 0 ? 0.0 : static_cast<double>(c.pos) / static_cast<double>(c.total());
}

void validate_instance(std::span<const FeatureSpec> features, const Instance& inst) {
  if (inst.values.size() != features.size())
    throw std::invalid_argument(fmt::format("instance has {} values, schema has {} features",
                                            inst.values.size(), features.size()));
  for (std::size_t j = 0; j < features.size(); ++j) {
    const double v = inst.values[j];
    if (is_missing(v) || !features[j].is_nominal()) continue;
    if (v < 0 || v != std::floor(v) || v >= static_cast<double>(features[j].category_count()))
      throw std::invalid_argument(
          fmt::format("category index {} out of range for feature '{}'", v, features[j].name));
  }
}

void Dataset::validate() const {
  std::unordered_set<std::string> names;
  for (const auto& f : features) {
    if (!names.insert(f.name).second)
      throw std::invalid_argument(fmt::format("duplicate feature name '{}'", f.name));
    if (const auto* nom = std::get_if<NominalFeature>(&f.kind)) {
      if (nom->categories.empty())
        throw std::invalid_argument(fmt::format("nominal feature '{}' has no categories", f.name));
      std::unordered_set<std::string> cats(nom->categories.begin(), nom->categories.end());
      if (cats.size() != nom->categories.size())
        throw std::invalid_argument(fmt::format("nominal feature '{}' repeats a category", f.name));
    }
  }
  if (instances.size() < 2)
    throw std::invalid_argument(
        fmt::format("dataset '{}' has {} instances, need at least 2", name, instances.size()));
  for (const auto& inst : instances) validate_instance(features, inst);
}

namespace {

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));

  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split_line(line);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size())
      throw std::runtime_error(fmt::format("{}: row {} has {} fields, header has {}",
                                           path.string(), line_no, fields.size(), header.size()));
    rows.push_back(std::move(fields));
  }
  if (header.empty()) throw std::runtime_error(fmt::format("{}: empty file", path.string()));
  if (header.size() < 2)
    throw std::runtime_error(fmt::format("{}: need at least one feature and a label", path.string()));

  std::size_t label_col = header.size() - 1;
  if (options.label_name) {
    const auto it = std::find(header.begin(), header.end(), *options.label_name);
    if (it == header.end())
      throw std::runtime_error(
          fmt::format("{}: no column named '{}'", path.string(), *options.label_name));
    label_col = static_cast<std::size_t>(it - header.begin());
  } else if (options.label_index) {
    if (*options.label_index >= header.size())
      throw std::runtime_error(fmt::format("{}: label index {} out of range", path.string(),
                                           *options.label_index));
    label_col = *options.label_index;
  }

  std::set<std::string> labels;
  for (const auto& r : rows) labels.insert(r[label_col]);
  if (labels.size() > 2)
    throw std::runtime_error(fmt::format("{}: more than 2 labels in column '{}'", path.string(),
                                         header[label_col]));
  std::string positive;
  if (options.positive_label) {
    positive = *options.positive_label;
    if (labels.size() == 2 && !labels.contains(positive))
      throw std::runtime_error(
          fmt::format("{}: positive label '{}' does not occur", path.string(), positive));
  } else if (!labels.empty()) {
    positive = *labels.rbegin();
  }

  auto missing = [&](const std::string& s) { return s.empty() || s == options.missing_marker; };

  Dataset ds;
  ds.name = path.stem().string();
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_col) continue;
    feature_cols.push_back(c);
    FeatureSpec spec{header[c], NumericFeature{}};
    bool numeric = !options.nominal_columns.contains(header[c]);
    for (std::size_t i = 0; numeric && i < rows.size(); ++i)
      if (!missing(rows[i][c]) && !parse_number(rows[i][c])) numeric = false;
    if (!numeric) {
      std::set<std::string> cats;
      for (const auto& r : rows)
        if (!missing(r[c])) cats.insert(r[c]);
      // A column with nothing but missing values still needs one category.
      if (cats.empty()) cats.insert(options.missing_marker);
      spec.kind = NominalFeature{{cats.begin(), cats.end()}};
    }
    ds.features.push_back(std::move(spec));
  }

  ds.instances.reserve(rows.size());
  for (const auto& r : rows) {
    Instance inst;
    inst.label = r[label_col] == positive ? Label::Positive : Label::Negative;
    inst.values.reserve(feature_cols.size());
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const auto& cell = r[feature_cols[j]];
      if (missing(cell)) {
        inst.values.push_back(kMissing);
      } else if (const auto* nom = std::get_if<NominalFeature>(&ds.features[j].kind)) {
        const auto it = std::lower_bound(nom->categories.begin(), nom->categories.end(), cell);
        inst.values.push_back(static_cast<double>(it - nom->categories.begin()));
      } else {
        inst.values.push_back(*parse_number(cell));
      }
    }
    ds.instances.push_back(std::move(inst));
  }
  ds.validate();
  return ds;
}

std::vector<std::size_t> SplitPlan::rows_in(std::size_t repetition, std::size_t fold) const {
  std::vector<std::size_t> out;
  const auto& a = assignments.at(repetition);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == fold) out.push_back(i);
  return out;
}

SplitPlan make_5x2(const Dataset& dataset, std::uint64_t seed, std::size_t repetitions) {
  const auto counts = dataset.class_counts();
  if (counts.pos < 2 || counts.neg < 2)
    throw std::invalid_argument(fmt::format(
        "dataset '{}' needs at least 2 instances of each class for 5x2 cross-validation (has {}+/{}-)",
        dataset.name, counts.pos, counts.neg));
  if (repetitions == 0) throw std::invalid_argument("repetitions must be positive");

  SplitPlan plan;
  plan.repetitions = repetitions;
  plan.seed = seed;
  const std::size_t n = dataset.instances.size();
  const std::size_t first = (n + 1) / 2;
  for (std::size_t r = 0; r < repetitions; ++r) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(seed, {r}));
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::uint8_t> fold(n);
    for (std::size_t i = 0; i < n; ++i) fold[order[i]] = i < first ? 0 : 1;
    plan.assignments.push_back(std::move(fold));
  }
  return plan;
}

}  // namespace rdtu
