#include "rdtu/cli.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdtu/combine.hpp"
#include "rdtu/data.hpp"
#include "rdtu/eval.hpp"
#include "rdtu/sim.hpp"

namespace rdtu::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void write_atomically(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
    }
  }
  fs::rename(tmp, path);
}

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", p.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A config file is a JSON object.  Any output of this tool also works: a
// report JSON carries the run under "run", CSV files carry it on their
// "# config:" line.
json load_config(const std::string& path) {
  const auto text = slurp(path);
  if (text.starts_with("# config: ")) {
    const auto eol = text.find('\n');
    return json::parse(text.substr(10, eol == std::string::npos ? std::string::npos : eol - 10));
  }
  auto j = json::parse(text);
  if (j.contains("format") && j.contains("run")) return j.at("run");
  if (!j.is_object()) throw std::runtime_error(fmt::format("{}: config must be a JSON object", path));
  return j;
}

// Resolves each setting from, in increasing priority: built-in default,
// config file, command-line flag.
class Settings {
 public:
  Settings(const std::string& config_path, std::string_view command,
           const std::set<std::string>& keys) {
    if (config_path.empty()) return;
    cfg_ = load_config(config_path);
    if (cfg_.contains("command") && cfg_.at("command") != command)
      throw std::runtime_error(fmt::format("config was written by '{}', not '{}'",
                                           cfg_.at("command").get<std::string>(), command));
    for (const auto& [k, v] : cfg_.items())
      if (k != "command" && !keys.contains(k))
        throw std::runtime_error(fmt::format("unknown config key '{}' for {}", k, command));
  }

  template <typename T>
  T get(const std::string& key, const CLI::Option* flag, const T& flag_value, T fallback) const {
    if (flag->count() > 0) return flag_value;
    if (cfg_.contains(key)) return cfg_.at(key).get<T>();
    return fallback;
  }

  std::vector<Method> methods(const CLI::Option* flag, const std::string& flag_value,
                              std::vector<Method> fallback) const {
    if (flag->count() > 0) return parse_method_list(flag_value);
    if (!cfg_.contains("methods")) return fallback;
    const auto& m = cfg_.at("methods");
    if (m.is_string()) return parse_method_list(m.get<std::string>());
    std::vector<Method> out;
    for (const auto& name : m) {
      const auto parsed = parse_method(name.get<std::string>());
      if (!parsed) throw std::invalid_argument(fmt::format("unknown method '{}'", name.get<std::string>()));
      out.push_back(*parsed);
    }
    return out;
  }

 private:
  json cfg_ = json::object();
};

std::vector<std::string> method_names(const std::vector<Method>& methods) {
  std::vector<std::string> out;
  for (auto m : methods) out.emplace_back(method_name(m));
  return out;
}

struct EvaluateFlags {
  std::string config;
  std::vector<std::string> datasets;
  std::size_t trees = 0;
  std::vector<std::size_t> leaf_sizes;
  std::string methods;
  std::uint64_t seed = 0;
  std::size_t repetitions = 0;
  std::size_t jobs = 0;
  double eva_smoothing = 0;
  std::string label;
  std::string positive;
  std::string out;
  std::map<std::string, CLI::Option*> opt;
};

struct SimulateFlags {
  std::string config;
  std::string mode;
  std::string methods;
  double p_pos = 0;
  std::size_t max_n = 0;
  std::size_t trials = 0;
  std::size_t ensemble_leaves = 0;
  std::vector<double> quantiles;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  double eva_smoothing = 0;
  std::string out;
  std::map<std::string, CLI::Option*> opt;
};

struct RankFlags {
  std::string config;
  std::vector<std::string> reports;
  std::string metric;
  std::vector<double> band;
  std::string out;
  std::map<std::string, CLI::Option*> opt;
};

void print_summary(std::ostream& out, const EvaluationReport& report) {
  for (const auto& d : report.datasets) {
    out << fmt::format("\n{}  ({} instances, {} features, class ratio {:.2f})\n", d.name,
                       d.instances, d.features, d.class_ratio);
    out << fmt::format("  {:<9}", "auc/acc");
    for (auto leaf : report.config.leaf_sizes) out << fmt::format(" {:>13}", fmt::format("leaf {}", leaf));
    out << '\n';
    for (auto m : report.config.methods) {
      out << fmt::format("  {:<9}", method_name(m));
      for (auto leaf : report.config.leaf_sizes) {
        double a = 0, c = 0;
        std::size_t n = 0;
        for (const auto& r : report.results)
          if (r.dataset == d.name && r.method == m && r.min_leaf == leaf) {
            a += r.auc;
            c += r.accuracy;
            ++n;
          }
        out << (n ? fmt::format(" {:>6.4f}/{:.4f}", a / n, c / n) : fmt::format(" {:>13}", "-"));
      }
      out << '\n';
    }
  }
}

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig defaults;
  const Settings s(f.config, "evaluate",
                   {"datasets", "trees", "leaf_sizes", "methods", "seed", "repetitions",
                    "eva_smoothing", "label", "positive"});
  ExperimentConfig cfg;
  const auto datasets = s.get("datasets", f.opt.at("datasets"), f.datasets, {});
  cfg.trees = s.get("trees", f.opt.at("trees"), f.trees, defaults.trees);
  cfg.leaf_sizes = s.get("leaf_sizes", f.opt.at("leaf_sizes"), f.leaf_sizes, defaults.leaf_sizes);
  cfg.methods = s.methods(f.opt.at("methods"), f.methods, defaults.methods);
  cfg.seed = s.get("seed", f.opt.at("seed"), f.seed, defaults.seed);
  cfg.repetitions = s.get("repetitions", f.opt.at("repetitions"), f.repetitions, defaults.repetitions);
  cfg.eva_smoothing =
      s.get("eva_smoothing", f.opt.at("eva_smoothing"), f.eva_smoothing, defaults.eva_smoothing);
  cfg.jobs = f.opt.at("jobs")->count() ? f.jobs : 1;
  const auto label = s.get("label", f.opt.at("label"), f.label, std::string{});
  const auto positive = s.get("positive", f.opt.at("positive"), f.positive, std::string{});
  if (datasets.empty()) throw std::invalid_argument("no datasets given");
  cfg.validate();

  json echo{{"command", "evaluate"},
            {"datasets", datasets},
            {"trees", cfg.trees},
            {"leaf_sizes", cfg.leaf_sizes},
            {"methods", method_names(cfg.methods)},
            {"seed", cfg.seed},
            {"repetitions", cfg.repetitions},
            {"eva_smoothing", cfg.eva_smoothing},
            {"label", label},
            {"positive", positive}};

  LoadOptions load;
  if (!label.empty()) load.label_name = label;
  if (!positive.empty()) load.positive_label = positive;
  std::vector<Dataset> loaded;
  std::set<std::string> names;
  for (const auto& path : datasets) {
    loaded.push_back(load_csv(path, load));
    if (!names.insert(loaded.back().name).second)
      throw std::invalid_argument(fmt::format("two datasets are named '{}'", loaded.back().name));
  }

  const auto report = run_experiment(loaded, cfg);
  const auto echo_text = echo.dump();
  const fs::path dir = f.out;
  fs::create_directories(dir);
  write_atomically(dir / "report.csv", results_csv(report, echo_text));
  write_atomically(dir / "report.json", report_json(report, echo_text, "report.csv"));

  print_summary(out, report);
  out << fmt::format("\n{} fold results written to {}\n", report.results.size(),
                     (dir / "report.csv").string());
  if (!report.skipped.empty()) {
    err << fmt::format("{} cells skipped:\n", report.skipped.size());
    for (const auto& sk : report.skipped)
      err << fmt::format("  {} leaf {} rep {} fold {}: {}\n", sk.dataset, sk.min_leaf,
                         sk.repetition, sk.fold, sk.reason);
    return 2;
  }
  return 0;
}

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  const SimConfig defaults;
  const Settings s(f.config, "simulate",
                   {"mode", "methods", "p_pos", "max_n", "trials", "ensemble_leaves", "quantiles",
                    "seed", "eva_smoothing"});
  SimConfig cfg;
  const auto mode = s.get("mode", f.opt.at("mode"), f.mode, std::string{"ensemble"});
  if (mode != "ensemble" && mode != "leaf")
    throw std::invalid_argument(fmt::format("mode must be 'ensemble' or 'leaf', got '{}'", mode));
  cfg.p_pos = s.get("p_pos", f.opt.at("p_pos"), f.p_pos, defaults.p_pos);
  cfg.max_n = s.get("max_n", f.opt.at("max_n"), f.max_n, defaults.max_n);
  cfg.trials = s.get("trials", f.opt.at("trials"), f.trials, defaults.trials);
  cfg.ensemble_leaves =
      s.get("ensemble_leaves", f.opt.at("ensemble_leaves"), f.ensemble_leaves, defaults.ensemble_leaves);
  cfg.quantiles = s.get("quantiles", f.opt.at("quantiles"), f.quantiles, defaults.quantiles);
  cfg.seed = s.get("seed", f.opt.at("seed"), f.seed, defaults.seed);
  cfg.eva_smoothing =
      s.get("eva_smoothing", f.opt.at("eva_smoothing"), f.eva_smoothing, defaults.eva_smoothing);
  cfg.jobs = f.opt.at("jobs")->count() ? f.jobs : 1;
  cfg.validate();

  std::vector<Method> all{std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<Method> scorer_methods{Method::ProbAvg, Method::LaplaceAvg, Method::PlsAvg,
                                     Method::CbAvg};
  const auto methods = s.methods(f.opt.at("methods"), f.methods, mode == "leaf" ? scorer_methods : all);
  std::vector<Scorer> scorers;
  if (mode == "leaf")
    for (auto m : methods) {
      const auto sc = parse_scorer(method_name(m));
      if (!sc)
        throw std::invalid_argument(
            fmt::format("'{}' is not a per-leaf scorer (leaf mode takes prob, laplace, pls, cb)",
                        method_name(m)));
      scorers.push_back(*sc);
    }

  json echo{{"command", "simulate"},
            {"mode", mode},
            {"methods", method_names(methods)},
            {"p_pos", cfg.p_pos},
            {"max_n", cfg.max_n},
            {"trials", cfg.trials},
            {"ensemble_leaves", cfg.ensemble_leaves},
            {"quantiles", cfg.quantiles},
            {"seed", cfg.seed},
            {"eva_smoothing", cfg.eva_smoothing}};
  const auto echo_text = echo.dump();

  std::vector<std::pair<fs::path, std::string>> files;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto summary = mode == "leaf" ? simulate_scorer(cfg, scorers[i])
                                        : simulate_combiner(cfg, methods[i]);
    files.emplace_back(fmt::format("sim_{}_{}.csv", mode, method_name(methods[i])),
                       trajectory_csv(summary, echo_text));
    const auto& last = summary.steps.back();
    out << fmt::format("{:<9} n={:<4} mean {:+.4f}  sd {:.4f}\n", summary.method, last.step,
                       last.mean, last.stddev);
  }
  const fs::path dir = f.out;
  fs::create_directories(dir);
  for (const auto& [name, content] : files) write_atomically(dir / name, content);
  out << fmt::format("{} trajectory files written to {}\n", files.size(), dir.string());
  return 0;
}

int cmd_rank(const RankFlags& f, std::ostream& out) {
  const Settings s(f.config, "rank", {"reports", "metric", "class_ratio_band"});
  const auto reports = s.get("reports", f.opt.at("reports"), f.reports, {});
  const auto metric_text = s.get("metric", f.opt.at("metric"), f.metric, std::string{"auc"});
  const auto band = s.get("class_ratio_band", f.opt.at("band"), f.band, {});
  const auto metric = parse_metric(metric_text);
  if (!metric) throw std::invalid_argument(fmt::format("unknown metric '{}'", metric_text));
  if (reports.empty()) throw std::invalid_argument("no reports given");
  if (!band.empty() && (band.size() != 2 || band[0] > band[1]))
    throw std::invalid_argument("class ratio band needs two values lo,hi with lo <= hi");

  std::vector<FoldResult> results;
  std::vector<std::string> excluded;
  for (const auto& path : reports) {
    const auto report = read_report(path);
    std::set<std::string> keep;
    for (const auto& d : report.datasets) {
      if (band.empty() || (d.class_ratio >= band[0] && d.class_ratio <= band[1]))
        keep.insert(d.name);
      else
        excluded.push_back(d.name);
    }
    for (const auto& r : report.results)
      if (keep.contains(r.dataset)) results.push_back(r);
  }
  if (results.empty()) throw std::invalid_argument("no dataset left to rank");
  const auto table = rank_table(results, *metric);

  json echo{{"command", "rank"}, {"reports", reports}, {"metric", metric_text},
            {"class_ratio_band", band}};
  const fs::path dir = f.out;
  fs::create_directories(dir);
  const auto file = dir / fmt::format("ranks_{}.csv", metric_name(*metric));
  write_atomically(file, rank_csv(table, echo.dump()));

  out << fmt::format("average {} ranks over {} datasets ({} cells, worst rank {})\n",
                     metric_name(*metric), table.datasets.size(), table.entries.size(),
                     table.entries.size());
  if (!excluded.empty())
    out << fmt::format("excluded by class ratio band: {}\n", fmt::join(excluded, ", "));
  for (const auto& e : table.entries)
    out << fmt::format("  {:<9} leaf {:<3} {:7.3f}\n", method_name(e.method), e.min_leaf,
                       e.average_rank);
  out << fmt::format("written to {}\n", file.string());
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random decision tree ensembles with uncertainty-aware combination"};
  app.require_subcommand(1);

  EvaluateFlags ev;
  auto* evaluate = app.add_subcommand("evaluate", "5x2 cross-validation over methods and leaf sizes");
  evaluate->add_option("--config", ev.config, "JSON config file (or any output of this tool)");
  ev.opt["datasets"] = evaluate->add_option("datasets", ev.datasets, "CSV dataset files");
  ev.opt["trees"] = evaluate->add_option("--trees", ev.trees, "trees per ensemble [100]");
  ev.opt["leaf_sizes"] = evaluate->add_option("--leaf-sizes", ev.leaf_sizes, "minimum leaf sizes [1,2,3,4,8,32]")
                             ->delimiter(',');
  ev.opt["methods"] = evaluate->add_option("--methods", ev.methods, "comma-separated methods [all]");
  ev.opt["seed"] = evaluate->add_option("--seed", ev.seed, "master seed [1]");
  ev.opt["repetitions"] = evaluate->add_option("--repetitions", ev.repetitions, "CV repetitions [5]");
  ev.opt["jobs"] = evaluate->add_option("--jobs", ev.jobs, "worker threads [1]")->check(CLI::PositiveNumber);
  ev.opt["eva_smoothing"] = evaluate->add_option("--eva-smoothing", ev.eva_smoothing, "EVA Laplace constant [0.1]");
  ev.opt["label"] = evaluate->add_option("--label", ev.label, "label column name [last column]");
  ev.opt["positive"] = evaluate->add_option("--positive", ev.positive, "positive label value");
  evaluate->add_option("--out", ev.out, "output directory")->capture_default_str();
  ev.out = "results";

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Bernoulli leaf-growth trajectories");
  simulate->add_option("--config", sim.config, "JSON config file (or any output of this tool)");
  sim.opt["mode"] = simulate->add_option("--mode", sim.mode, "ensemble or leaf [ensemble]");
  sim.opt["methods"] = simulate->add_option("--methods", sim.methods, "comma-separated methods");
  sim.opt["p_pos"] = simulate->add_option("--p-pos", sim.p_pos, "positive rate [0.75]");
  sim.opt["max_n"] = simulate->add_option("--max-n", sim.max_n, "samples per leaf [100]");
  sim.opt["trials"] = simulate->add_option("--trials", sim.trials, "repeated trajectories [100]");
  sim.opt["ensemble_leaves"] = simulate->add_option("--ensemble-leaves", sim.ensemble_leaves, "leaves per ensemble [100]");
  sim.opt["quantiles"] = simulate->add_option("--quantiles", sim.quantiles, "quantile levels [0.1,0.25,0.75,0.9]")
                             ->delimiter(',');
  sim.opt["seed"] = simulate->add_option("--seed", sim.seed, "master seed [1]");
  sim.opt["jobs"] = simulate->add_option("--jobs", sim.jobs, "worker threads [1]")->check(CLI::PositiveNumber);
  sim.opt["eva_smoothing"] = simulate->add_option("--eva-smoothing", sim.eva_smoothing, "EVA Laplace constant [0.1]");
  simulate->add_option("--out", sim.out, "output directory")->capture_default_str();
  sim.out = "sim";

  RankFlags rk;
  auto* rank = app.add_subcommand("rank", "average ranks across evaluation reports");
  rank->add_option("--config", rk.config, "JSON config file (or any output of this tool)");
  rk.opt["reports"] = rank->add_option("reports", rk.reports, "report.json files from evaluate");
  rk.opt["metric"] = rank->add_option("--metric", rk.metric, "auc or accuracy [auc]");
  rk.opt["band"] = rank->add_option("--class-ratio-band", rk.band, "keep datasets with lo <= class ratio <= hi")
                       ->delimiter(',');
  rank->add_option("--out", rk.out, "output directory")->capture_default_str();
  rk.out = ".";

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (evaluate->parsed()) return cmd_evaluate(ev, out, err);
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (rank->parsed()) return cmd_rank(rk, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace rdtu::cli
