#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rdtu/data.hpp"

namespace rdtu {

/// Class counts w = [w+, w-] of the training instances that reached a node.
struct LeafStats {
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;

  std::uint32_t total() const noexcept { return pos + neg; }
  LeafStats swapped() const noexcept { return {neg, pos}; }
  friend bool operator==(const LeafStats&, const LeafStats&) = default;
};

/// One LeafStats per tree for a single routed instance.
using LeafVector = std::vector<LeafStats>;

enum class NodeKind : std::uint8_t { Leaf, Numeric, Nominal };

/// Nodes live in a flat array; children of a node are contiguous starting at
/// first_child.  Numeric tests have two children (value <= threshold goes to
/// the first), nominal tests one child per category.  missing_child is the
/// branch that took the most training instances and receives missing values.
struct TreeNode {
  NodeKind kind = NodeKind::Leaf;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  LeafStats counts;
  std::uint32_t first_child = 0;
  std::uint32_t child_count = 0;
  std::uint32_t missing_child = 0;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes);

  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }
  std::size_t leaf_count() const noexcept;
  std::size_t depth() const;

  /// Counts of the node the values descend to.  Stops early at a node whose
  /// selected branch saw no training instance, so the result has n >= 1
  /// whenever the root does.
  LeafStats route(std::span<const double> values) const;

  friend bool operator==(const Tree& a, const Tree& b);

 private:
  std::vector<TreeNode> nodes_;
};

struct TreeParams {
  std::size_t min_leaf = 1;
  std::optional<std::size_t> max_depth;
  /// Random test draws attempted before a node that cannot be split
  /// becomes a leaf.
  int retries = 10;
};

/// Grows a random tree over `rows` of `data`.  Features are drawn uniformly
/// from those still available (a nominal feature at most once per path),
/// numeric thresholds are the value of a uniformly drawn instance.
Tree build_tree(const Dataset& data, std::span<const std::size_t> rows,
                const TreeParams& params, std::mt19937_64& rng);

class EnsembleModel {
 public:
  EnsembleModel(std::vector<FeatureSpec> features, std::vector<Tree> trees,
                std::size_t min_leaf, std::uint64_t seed, double prior_pos);

  std::span<const FeatureSpec> features() const noexcept { return features_; }
  std::span<const Tree> trees() const noexcept { return trees_; }
  std::size_t size() const noexcept { return trees_.size(); }
  std::size_t min_leaf() const noexcept { return min_leaf_; }
  std::uint64_t seed() const noexcept { return seed_; }
  /// Fraction of positives in the training data.
  double prior_pos() const noexcept { return prior_pos_; }

  LeafVector route(const Instance& instance) const;

 private:
  std::vector<FeatureSpec> features_;
  std::vector<Tree> trees_;
  std::size_t min_leaf_;
  std::uint64_t seed_;
  double prior_pos_;
};

/// Tree i is grown from derive_seed(seed, {i}), so the ensemble does not
/// depend on build order.
EnsembleModel build_ensemble(const Dataset& data, std::span<const std::size_t> rows,
                             std::size_t k, std::size_t min_leaf, std::uint64_t seed,
                             std::optional<std::size_t> max_depth = std::nullopt);

/// JSON model format, tagged "rdtu-model/1".
std::string model_to_json(const EnsembleModel& model);
EnsembleModel model_from_json(const std::string& text);
void save_model(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

}  // namespace rdtu
