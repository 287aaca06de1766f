#include "rdtu/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "csv.hpp"
#include "json.hpp"
#include "rdtu/rdt.hpp"
#include "rdtu/seed.hpp"

namespace rdtu {

std::string_view metric_name(Metric m) { return m == Metric::Auc ? "auc" : "accuracy"; }

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "auc") return Metric::Auc;
  if (name == "accuracy") return Metric::Accuracy;
  return std::nullopt;
}

double auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  for (double s : scores)
    if (std::isnan(s)) throw std::invalid_argument("auc: NaN score");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  // Twice the midrank, so every quantity below is an exact integer.
  long long rank_sum2 = 0;
  long long n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const auto midrank2 = static_cast<long long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == Label::Positive) {
        rank_sum2 += midrank2;
        ++n_pos;
      }
    i = j;
  }
  const long long n_neg = static_cast<long long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc needs both classes");
  const long long u2 = rank_sum2 - n_pos * (n_pos + 1);
  return static_cast<double>(u2) / static_cast<double>(2 * n_pos * n_neg);
}

double accuracy(std::span<const double> scores, std::span<const Label> labels, double prior_pos) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("accuracy: scores and labels differ in length");
  if (scores.empty()) throw std::invalid_argument("accuracy of an empty prediction set");
  const Label tie = prior_pos >= 0.5 ? Label::Positive : Label::Negative;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const Label predicted =
        scores[i] > 0 ? Label::Positive : (scores[i] < 0 ? Label::Negative : tie);
    correct += predicted == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

void ExperimentConfig::validate() const {
  if (trees < 1) throw std::invalid_argument("trees must be at least 1");
  if (leaf_sizes.empty()) throw std::invalid_argument("no leaf sizes given");
  std::set<std::size_t> seen;
  for (auto l : leaf_sizes) {
    if (l < 1) throw std::invalid_argument("leaf sizes must be positive");
    if (!seen.insert(l).second) throw std::invalid_argument(fmt::format("leaf size {} repeated", l));
  }
  if (methods.empty()) throw std::invalid_argument("no methods given");
  std::set<Method> mseen;
  for (auto m : methods)
    if (!mseen.insert(m).second)
      throw std::invalid_argument(fmt::format("method {} repeated", method_name(m)));
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (!(eva_smoothing > 0)) throw std::invalid_argument("eva smoothing must be positive");
}

namespace {

std::size_t method_order(Method m) {
  return static_cast<std::size_t>(
      std::find(std::begin(kAllMethods), std::end(kAllMethods), m) - std::begin(kAllMethods));
}

std::uint64_t name_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Cell {
  std::size_t dataset;
  std::size_t repetition;
  std::size_t fold;
  std::size_t min_leaf;
};

struct CellOutput {
  std::vector<FoldResult> results;
  std::optional<SkippedCell> skipped;
};

CellOutput evaluate_cell(const Dataset& ds, const SplitPlan& plan, const Cell& cell,
                         const ExperimentConfig& config) {
  CellOutput out;
  auto skip = [&](std::string reason) {
    out.skipped = SkippedCell{ds.name, cell.min_leaf, cell.repetition, cell.fold, std::move(reason)};
    return out;
  };
  const auto test_rows = plan.rows_in(cell.repetition, cell.fold);
  const auto train_rows = plan.rows_in(cell.repetition, 1 - cell.fold);
  const auto train_counts = ds.class_counts(train_rows);
  const auto test_counts = ds.class_counts(test_rows);
  if (train_counts.pos == 0 || train_counts.neg == 0)
    return skip("training fold holds a single class");
  if (test_counts.pos == 0 || test_counts.neg == 0) return skip("test fold holds a single class");

  try {
    const auto seed = derive_seed(config.seed, {name_hash(ds.name), cell.repetition, cell.fold,
                                                cell.min_leaf});
    const auto model = build_ensemble(ds, train_rows, config.trees, cell.min_leaf, seed);
    const CombineContext ctx{model.prior_pos(), config.eva_smoothing};

    std::vector<Label> labels;
    std::vector<std::vector<double>> scores(config.methods.size());
    labels.reserve(test_rows.size());
    for (auto r : test_rows) {
      const auto& inst = ds.instances[r];
      const auto leaves = model.route(inst);
      labels.push_back(inst.label);
      for (std::size_t m = 0; m < config.methods.size(); ++m)
        scores[m].push_back(combine(config.methods[m], leaves, ctx));
    }
    for (std::size_t m = 0; m < config.methods.size(); ++m)
      out.results.push_back(FoldResult{ds.name, config.methods[m], cell.min_leaf, cell.repetition,
                                       cell.fold, auc(scores[m], labels),
                                       accuracy(scores[m], labels, ctx.prior_pos)});
  } catch (const std::exception& e) {
    out.results.clear();
    return skip(e.what());
  }
  return out;
}

}  // namespace

void EvaluationReport::sort_canonical() {
  std::map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < datasets.size(); ++i) order.emplace(datasets[i].name, i);
  auto rank_of = [&](const std::string& name) {
    const auto it = order.find(name);
    return it == order.end() ? order.size() : it->second;
  };
  std::stable_sort(results.begin(), results.end(), [&](const FoldResult& a, const FoldResult& b) {
    return std::tuple(rank_of(a.dataset), a.dataset, method_order(a.method), a.min_leaf,
                      a.repetition, a.fold) < std::tuple(rank_of(b.dataset), b.dataset,
                                                         method_order(b.method), b.min_leaf,
                                                         b.repetition, b.fold);
  });
  std::stable_sort(skipped.begin(), skipped.end(), [&](const SkippedCell& a, const SkippedCell& b) {
    return std::tuple(rank_of(a.dataset), a.dataset, a.min_leaf, a.repetition, a.fold) <
           std::tuple(rank_of(b.dataset), b.dataset, b.min_leaf, b.repetition, b.fold);
  });
}

EvaluationReport run_experiment(std::span<const Dataset> datasets, const ExperimentConfig& config) {
  config.validate();
  EvaluationReport report;
  report.config = config;

  std::vector<std::optional<SplitPlan>> plans;
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const auto& ds = datasets[d];
    report.datasets.push_back(
        {ds.name, ds.instances.size(), ds.features.size(), ds.class_ratio()});
    try {
      plans.emplace_back(make_5x2(ds, derive_seed(config.seed, {name_hash(ds.name)}),
                                  config.repetitions));
    } catch (const std::exception& e) {
      plans.emplace_back();
      for (std::size_t r = 0; r < config.repetitions; ++r)
        for (std::size_t f = 0; f < 2; ++f)
          for (auto leaf : config.leaf_sizes)
            report.skipped.push_back({ds.name, leaf, r, f, e.what()});
      continue;
    }
    for (std::size_t r = 0; r < config.repetitions; ++r)
      for (std::size_t f = 0; f < 2; ++f)
        for (auto leaf : config.leaf_sizes) cells.push_back({d, r, f, leaf});
  }

  std::vector<CellOutput> outputs(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto& c = cells[i];
      outputs[i] = evaluate_cell(datasets[c.dataset], *plans[c.dataset], c, config);
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, std::max<std::size_t>(cells.size(), 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  for (auto& o : outputs) {
    std::move(o.results.begin(), o.results.end(), std::back_inserter(report.results));
    if (o.skipped) report.skipped.push_back(std::move(*o.skipped));
  }
  report.sort_canonical();
  return report;
}

std::vector<double> descending_midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return values[a] > values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid;
    i = j;
  }
  return ranks;
}

RankTable rank_table(std::span<const FoldResult> results, Metric metric) {
  using CellKey = std::pair<std::size_t, std::size_t>;  // (method order, min_leaf)
  std::vector<std::string> datasets;
  std::map<std::string, std::map<CellKey, std::pair<double, std::size_t>>> sums;
  std::set<std::tuple<std::string, std::size_t, std::size_t, std::size_t, std::size_t>> seen;
  std::set<CellKey> grid;
  for (const auto& r : results) {
    const CellKey key{method_order(r.method), r.min_leaf};
    if (!seen.insert({r.dataset, key.first, key.second, r.repetition, r.fold}).second)
      throw std::invalid_argument(fmt::format("duplicate result for {} / {} / leaf {} / rep {} fold {}",
                                              r.dataset, method_name(r.method), r.min_leaf,
                                              r.repetition, r.fold));
    if (!sums.contains(r.dataset)) datasets.push_back(r.dataset);
    auto& acc = sums[r.dataset][key];
    acc.first += metric == Metric::Auc ? r.auc : r.accuracy;
    acc.second += 1;
    grid.insert(key);
  }
  if (datasets.empty()) throw std::invalid_argument("no results to rank");

  std::vector<std::string> missing;
  for (const auto& d : datasets)
    for (const auto& key : grid)
      if (!sums[d].contains(key))
        missing.push_back(fmt::format("{}:{}/leaf{}", d, method_name(kAllMethods[key.first]),
                                      key.second));
  if (!missing.empty())
    throw std::invalid_argument(fmt::format("ragged grid, missing cells: {}",
                                            fmt::join(missing, ", ")));

  RankTable table;
  table.metric = metric;
  table.datasets = datasets;
  for (const auto& key : grid) table.entries.push_back({kAllMethods[key.first], key.second, 0.0});
  for (const auto& d : datasets) {
    std::vector<double> means;
    for (const auto& key : grid) {
      const auto& [sum, count] = sums[d][key];
      means.push_back(sum / static_cast<double>(count));
    }
    auto ranks = descending_midranks(means);
    for (std::size_t c = 0; c < ranks.size(); ++c) table.entries[c].average_rank += ranks[c];
    table.per_dataset.push_back(std::move(ranks));
  }
  for (auto& e : table.entries) e.average_rank /= static_cast<double>(datasets.size());
  return table;
}

std::string results_csv(const EvaluationReport& report, std::string_view echo) {
  std::string out = fmt::format("# config: {}\n", echo);
  out += "dataset,method,min_leaf,repetition,fold,auc,accuracy\n";
  for (const auto& r : report.results)
    out += fmt::format("{},{},{},{},{},{},{}\n", csv::quote(r.dataset), method_name(r.method),
                       r.min_leaf, r.repetition, r.fold, r.auc, r.accuracy);
  return out;
}

namespace {

template <typename T>
T parse_field(const std::string& s, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(fmt::format("results line {}: cannot parse '{}'", line_no, s));
  return v;
}

}  // namespace

std::vector<FoldResult> parse_results_csv(std::string_view text) {
  static const std::vector<std::string> kColumns{"dataset", "method", "min_leaf", "repetition",
                                                 "fold",    "auc",    "accuracy"};
  std::vector<FoldResult> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.starts_with('#') || csv::trim(line).empty()) continue;
    const auto f = csv::split_line(line);
    if (!header) {
      if (f != kColumns)
        throw std::invalid_argument(fmt::format("results line {}: unexpected header", line_no));
      header = true;
      continue;
    }
    if (f.size() != kColumns.size())
      throw std::invalid_argument(fmt::format("results line {}: expected 7 fields", line_no));
    const auto method = parse_method(f[1]);
    if (!method)
      throw std::invalid_argument(fmt::format("results line {}: unknown method '{}'", line_no, f[1]));
    out.push_back({f[0], *method, parse_field<std::size_t>(f[2], line_no),
                   parse_field<std::size_t>(f[3], line_no), parse_field<std::size_t>(f[4], line_no),
                   parse_field<double>(f[5], line_no), parse_field<double>(f[6], line_no)});
  }
  if (!header) throw std::invalid_argument("results file has no header");
  return out;
}

namespace {

nlohmann::json config_to_json(const ExperimentConfig& c) {
  std::vector<std::string> methods;
  for (auto m : c.methods) methods.emplace_back(method_name(m));
  return {{"trees", c.trees},
          {"leaf_sizes", c.leaf_sizes},
          {"methods", methods},
          {"seed", c.seed},
          {"repetitions", c.repetitions},
          {"eva_smoothing", c.eva_smoothing}};
}

nlohmann::json ranks_to_json(const RankTable& t) {
  auto arr = nlohmann::json::array();
  for (const auto& e : t.entries)
    arr.push_back({{"method", method_name(e.method)},
                   {"min_leaf", e.min_leaf},
                   {"average_rank", e.average_rank}});
  return arr;
}

}  // namespace

std::string report_json(const EvaluationReport& report, std::string_view echo,
                        std::string_view results_file) {
  using nlohmann::json;
  json j;
  j["format"] = "rdtu-report/1";
  j["run"] = json::parse(echo);
  j["config"] = config_to_json(report.config);
  j["results_csv"] = results_file;
  auto ds = json::array();
  for (const auto& d : report.datasets)
    ds.push_back({{"name", d.name},
                  {"instances", d.instances},
                  {"features", d.features},
                  {"class_ratio", d.class_ratio}});
  j["datasets"] = std::move(ds);
  auto skipped = json::array();
  for (const auto& s : report.skipped)
    skipped.push_back({{"dataset", s.dataset},
                       {"min_leaf", s.min_leaf},
                       {"repetition", s.repetition},
                       {"fold", s.fold},
                       {"reason", s.reason}});
  j["skipped"] = std::move(skipped);
  json ranks = json::object();
  for (auto metric : {Metric::Auc, Metric::Accuracy}) {
    try {
      ranks[std::string(metric_name(metric))] = ranks_to_json(rank_table(report, metric));
    } catch (const std::invalid_argument& e) {
      ranks[std::string(metric_name(metric))] = {{"error", e.what()}};
    }
  }
  j["ranks"] = std::move(ranks);
  return j.dump(2) + "\n";
}

EvaluationReport read_report(const std::filesystem::path& json_path) {
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", p.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const auto j = nlohmann::json::parse(slurp(json_path));
  if (j.value("format", "") != "rdtu-report/1")
    throw std::invalid_argument(fmt::format("{}: not an rdtu report", json_path.string()));
  EvaluationReport report;
  const auto& c = j.at("config");
  report.config.trees = c.at("trees").get<std::size_t>();
  report.config.leaf_sizes = c.at("leaf_sizes").get<std::vector<std::size_t>>();
  report.config.methods.clear();
  for (const auto& m : c.at("methods")) {
    const auto parsed = parse_method(m.get<std::string>());
    if (!parsed) throw std::invalid_argument("report names an unknown method");
    report.config.methods.push_back(*parsed);
  }
  report.config.seed = c.at("seed").get<std::uint64_t>();
  report.config.repetitions = c.at("repetitions").get<std::size_t>();
  report.config.eva_smoothing = c.at("eva_smoothing").get<double>();
  for (const auto& d : j.at("datasets"))
    report.datasets.push_back({d.at("name").get<std::string>(), d.at("instances").get<std::size_t>(),
                               d.at("features").get<std::size_t>(),
                               d.at("class_ratio").get<double>()});
  for (const auto& s : j.at("skipped"))
    report.skipped.push_back({s.at("dataset").get<std::string>(), s.at("min_leaf").get<std::size_t>(),
                              s.at("repetition").get<std::size_t>(), s.at("fold").get<std::size_t>(),
                              s.at("reason").get<std::string>()});
  const auto csv_path = json_path.parent_path() / j.at("results_csv").get<std::string>();
  report.results = parse_results_csv(slurp(csv_path));
  return report;
}

std::string rank_csv(const RankTable& table, std::string_view echo) {
  std::string out = fmt::format("# config: {}\n", echo);
  out += "metric,method,min_leaf,average_rank,datasets\n";
  for (const auto& e : table.entries)
    out += fmt::format("{},{},{},{},{}\n", metric_name(table.metric), method_name(e.method),
                       e.min_leaf, e.average_rank, table.datasets.size());
  return out;
}

}  // namespace rdtu
