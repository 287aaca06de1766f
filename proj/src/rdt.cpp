#include "rdtu/rdt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"
#include "rdtu/seed.hpp"

namespace rdtu {

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("tree has no nodes");
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::Leaf) continue;
    if (n.child_count < 2 || std::size_t{n.first_child} + n.child_count > nodes_.size() ||
        n.missing_child >= n.child_count)
      throw std::invalid_argument("tree node has invalid child references");
  }
}

std::size_t Tree::leaf_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.kind == NodeKind::Leaf; }));
}

std::size_t Tree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& n = nodes_[idx];
    for (std::uint32_t c = 0; c < n.child_count; ++c) stack.emplace_back(n.first_child + c, d + 1);
  }
  return best;
}

LeafStats Tree::route(std::span<const double> values) const {
  const TreeNode* node = &nodes_.front();
  while (node->kind != NodeKind::Leaf) {
    const double v = values[node->feature];
    std::uint32_t branch;
    if (is_missing(v))
      branch = node->missing_child;
    else if (node->kind == NodeKind::Numeric)
      branch = v <= node->threshold ? 0 : 1;
    else
      branch = static_cast<std::uint32_t>(v);
    if (branch >= node->child_count)
      throw std::invalid_argument("category index outside the tree's branches");
    const TreeNode& child = nodes_[node->first_child + branch];
    if (child.counts.total() == 0) break;
    node = &child;
  }
  return node->counts;
}

bool operator==(const Tree& a, const Tree& b) {
  return std::equal(a.nodes_.begin(), a.nodes_.end(), b.nodes_.begin(), b.nodes_.end(),
                    [](const TreeNode& x, const TreeNode& y) {
                      return x.kind == y.kind && x.feature == y.feature &&
                             x.threshold == y.threshold && x.counts == y.counts &&
                             x.first_child == y.first_child && x.child_count == y.child_count &&
                             x.missing_child == y.missing_child;
                    });
}

namespace {

LeafStats count_rows(const Dataset& data, std::span<const std::size_t> rows) {
  const auto c = data.class_counts(rows);
  return {static_cast<std::uint32_t>(c.pos), static_cast<std::uint32_t>(c.neg)};
}

std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

struct Split {
  NodeKind kind = NodeKind::Leaf;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  std::uint32_t missing_child = 0;
  std::vector<std::vector<std::size_t>> parts;
};

// Draws one random test; returns nothing if it does not separate the rows.
std::optional<Split> draw_split(const Dataset& data, std::span<const std::size_t> rows,
                                std::span<const std::uint32_t> available, std::mt19937_64& rng) {
  Split s;
  s.feature = available[draw_index(rng, available.size())];
  const auto& spec = data.features[s.feature];
  std::vector<std::size_t> missing;
  if (spec.is_nominal()) {
    s.kind = NodeKind::Nominal;
    s.parts.resize(spec.category_count());
    for (auto r : rows) {
      const double v = data.instances[r].values[s.feature];
      if (is_missing(v))
        missing.push_back(r);
      else
        s.parts[static_cast<std::size_t>(v)].push_back(r);
    }
  } else {
    s.kind = NodeKind::Numeric;
    s.threshold = data.instances[rows[draw_index(rng, rows.size())]].values[s.feature];
    if (is_missing(s.threshold)) return std::nullopt;
    s.parts.resize(2);
    for (auto r : rows) {
      const double v = data.instances[r].values[s.feature];
      if (is_missing(v))
        missing.push_back(r);
      else
        s.parts[v <= s.threshold ? 0 : 1].push_back(r);
    }
  }
  std::size_t largest = 0;
  for (std::size_t i = 1; i < s.parts.size(); ++i)
    if (s.parts[i].size() > s.parts[largest].size()) largest = i;
  s.missing_child = static_cast<std::uint32_t>(largest);
  auto& sink = s.parts[largest];
  sink.insert(sink.end(), missing.begin(), missing.end());
  std::sort(sink.begin(), sink.end());

  const auto nonempty =
      std::count_if(s.parts.begin(), s.parts.end(), [](const auto& p) { return !p.empty(); });
  if (nonempty < 2) return std::nullopt;
  return s;
}

}  // namespace

Tree build_tree(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params,
                std::mt19937_64& rng) {
  if (rows.empty()) throw std::invalid_argument("cannot build a tree on zero instances");
  if (params.min_leaf < 1) throw std::invalid_argument("min_leaf must be at least 1");

  struct Work {
    std::uint32_t node;
    std::vector<std::size_t> rows;
    std::size_t depth;
    std::vector<bool> used_nominal;
  };

  const auto feature_count = static_cast<std::uint32_t>(data.features.size());
  std::vector<TreeNode> nodes(1);
  std::vector<Work> stack;
  stack.push_back({0, {rows.begin(), rows.end()}, 0, std::vector<bool>(feature_count, false)});
  std::vector<std::uint32_t> available;

  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    nodes[w.node].counts = count_rows(data, w.rows);

    if (w.rows.size() <= params.min_leaf) continue;
    if (params.max_depth && w.depth >= *params.max_depth) continue;
    available.clear();
    for (std::uint32_t f = 0; f < feature_count; ++f)
      if (!w.used_nominal[f]) available.push_back(f);
    if (available.empty()) continue;

    std::optional<Split> split;
    for (int attempt = 0; attempt < params.retries && !split; ++attempt)
      split = draw_split(data, w.rows, available, rng);
    if (!split) continue;

    auto& node = nodes[w.node];
    node.kind = split->kind;
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.missing_child = split->missing_child;
    node.first_child = static_cast<std::uint32_t>(nodes.size());
    node.child_count = static_cast<std::uint32_t>(split->parts.size());
    const auto first = node.first_child;
    nodes.resize(nodes.size() + split->parts.size());

    auto used = w.used_nominal;
    if (split->kind == NodeKind::Nominal) used[split->feature] = true;
    // Reverse push keeps the depth-first visiting order left to right.
    for (std::size_t i = split->parts.size(); i-- > 0;)
      stack.push_back({first + static_cast<std::uint32_t>(i), std::move(split->parts[i]),
                       w.depth + 1, used});
  }
  return Tree(std::move(nodes));
}

EnsembleModel::EnsembleModel(std::vector<FeatureSpec> features, std::vector<Tree> trees,
                             std::size_t min_leaf, std::uint64_t seed, double prior_pos)
    : features_(std::move(features)),
      trees_(std::move(trees)),
      min_leaf_(min_leaf),
      seed_(seed),
      prior_pos_(prior_pos) {
  if (trees_.empty()) throw std::invalid_argument("ensemble needs at least one tree");
  if (!(prior_pos_ > 0.0 && prior_pos_ < 1.0))
    throw std::invalid_argument(fmt::format("prior_pos must lie in (0,1), got {}", prior_pos_));
}

LeafVector EnsembleModel::route(const Instance& instance) const {
  validate_instance(features_, instance);
  LeafVector out;
  out.reserve(trees_.size());
  for (const auto& t : trees_) out.push_back(t.route(instance.values));
  return out;
}

EnsembleModel build_ensemble(const Dataset& data, std::span<const std::size_t> rows, std::size_t k,
                             std::size_t min_leaf, std::uint64_t seed,
                             std::optional<std::size_t> max_depth) {
  if (k < 1) throw std::invalid_argument("ensemble size must be at least 1");
  if (rows.empty()) throw std::invalid_argument("cannot build an ensemble on zero instances");
  const auto counts = data.class_counts(rows);
  if (counts.pos == 0 || counts.neg == 0)
    throw std::invalid_argument("training data must contain both classes");

  TreeParams params;
  params.min_leaf = min_leaf;
  params.max_depth = max_depth;
  std::vector<Tree> trees;
  trees.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::mt19937_64 rng(derive_seed(seed, {i}));
    trees.push_back(build_tree(data, rows, params, rng));
  }
  const double prior = static_cast<double>(counts.pos) / static_cast<double>(counts.total());
  return EnsembleModel(data.features, std::move(trees), min_leaf, seed, prior);
}

namespace {

constexpr const char* kModelFormat = "rdtu-model/1";

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Leaf: return "leaf";
    case NodeKind::Numeric: return "numeric";
    case NodeKind::Nominal: return "nominal";
  }
  return "leaf";
}

NodeKind kind_from(const std::string& s) {
  if (s == "leaf") return NodeKind::Leaf;
  if (s == "numeric") return NodeKind::Numeric;
  if (s == "nominal") return NodeKind::Nominal;
  throw std::invalid_argument(fmt::format("unknown node kind '{}'", s));
}

}  // namespace

std::string model_to_json(const EnsembleModel& model) {
  using nlohmann::json;
  json j;
  j["format"] = kModelFormat;
  j["min_leaf"] = model.min_leaf();
  j["seed"] = model.seed();
  j["prior_pos"] = model.prior_pos();
  json features = json::array();
  for (const auto& f : model.features()) {
    json jf{{"name", f.name}};
    if (const auto* nom = std::get_if<NominalFeature>(&f.kind)) {
      jf["kind"] = "nominal";
      jf["categories"] = nom->categories;
    } else {
      jf["kind"] = "numeric";
    }
    features.push_back(std::move(jf));
  }
  j["features"] = std::move(features);
  json trees = json::array();
  for (const auto& t : model.trees()) {
    json nodes = json::array();
    for (const auto& n : t.nodes())
      nodes.push_back(json{{"kind", kind_name(n.kind)},
                           {"feature", n.feature},
                           {"threshold", n.threshold},
                           {"counts", {n.counts.pos, n.counts.neg}},
                           {"first_child", n.first_child},
                           {"child_count", n.child_count},
                           {"missing_child", n.missing_child}});
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j.dump();
}

EnsembleModel model_from_json(const std::string& text) {
  using nlohmann::json;
  const json j = json::parse(text);
  if (j.value("format", "") != kModelFormat)
    throw std::invalid_argument(fmt::format("unsupported model format, expected {}", kModelFormat));
  std::vector<FeatureSpec> features;
  for (const auto& jf : j.at("features")) {
    FeatureSpec f{jf.at("name").get<std::string>(), NumericFeature{}};
    if (jf.at("kind") == "nominal")
      f.kind = NominalFeature{jf.at("categories").get<std::vector<std::string>>()};
    features.push_back(std::move(f));
  }
  std::vector<Tree> trees;
  for (const auto& jt : j.at("trees")) {
    std::vector<TreeNode> nodes;
    for (const auto& jn : jt) {
      TreeNode n;
      n.kind = kind_from(jn.at("kind").get<std::string>());
      n.feature = jn.at("feature").get<std::uint32_t>();
      n.threshold = jn.at("threshold").get<double>();
      n.counts = {jn.at("counts").at(0).get<std::uint32_t>(),
                  jn.at("counts").at(1).get<std::uint32_t>()};
      n.first_child = jn.at("first_child").get<std::uint32_t>();
      n.child_count = jn.at("child_count").get<std::uint32_t>();
      n.missing_child = jn.at("missing_child").get<std::uint32_t>();
      if (n.kind != NodeKind::Leaf && n.feature >= features.size())
        throw std::invalid_argument("node tests an unknown feature");
      nodes.push_back(n);
    }
    trees.emplace_back(std::move(nodes));
  }
  return EnsembleModel(std::move(features), std::move(trees), j.at("min_leaf").get<std::size_t>(),
                       j.at("seed").get<std::uint64_t>(), j.at("prior_pos").get<double>());
}

void save_model(const EnsembleModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << model_to_json(model) << '\n';
}

EnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace rdtu
