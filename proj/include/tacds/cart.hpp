#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tacds/common.hpp"

namespace tacds {

/// Node of a binary regression tree. Every node keeps the mean, count and
/// SSE of the training targets routed to it, so any internal node can be
/// collapsed into a leaf during pruning.
struct TreeNode {
    bool leaf = true;
    std::size_t variable = 0;
    double threshold = 0.0;  // x[variable] <= threshold goes left
    std::size_t left = 0;
    std::size_t right = 0;
    double prediction = 0.0;  // mean of node targets
    std::size_t sample_count = 0;
    double sse = 0.0;
};

/// Flat tree; node 0 is the root.
class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes);

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const TreeNode& root() const { return nodes_.front(); }

    double predict(std::span<const double> x) const;
    /// Index of the leaf x is routed to.
    std::size_t leaf_index(std::span<const double> x) const;
    std::size_t terminal_count() const;
    std::size_t depth() const;

    /// Copy in which the listed internal nodes become leaves; unreachable
    /// nodes are dropped and indices compacted.
    RegressionTree collapsed(std::span<const std::size_t> nodes_to_collapse) const;

private:
    std::vector<TreeNode> nodes_;
};

/// Greedy recursive binary partitioning minimizing child SSE. Thresholds
/// are midpoints between consecutive distinct values; every child holds at
/// least min_leaf samples. Ties go to the lowest variable index, then the
/// lowest threshold.
RegressionTree grow(const RegressionSet& data, std::size_t min_leaf = 5);

struct PrunedEntry {
    double alpha = 0.0;
    RegressionTree tree;
    std::size_t terminal_count = 0;
    double cv_cost = 0.0;  // cross-validated mean squared error
};

struct PrunedSequence {
    std::vector<PrunedEntry> entries;
};

/// Nested weakest-link subtrees with strictly increasing alphas, from the
/// full tree (alpha 0) down to the root-only tree. cv_cost is left at zero.
PrunedSequence weakest_link_sequence(const RegressionTree& tree);

struct CartOptions {
    std::size_t min_leaf = 5;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
};

/// weakest_link_sequence plus a k-fold cross-validated cost per subtree.
/// Fold trees are grown with options.min_leaf on seeded folds.
PrunedSequence prune_sequence(const RegressionTree& tree, const RegressionSet& data, const CartOptions& options = {});

/// Minimum cv_cost; ties go to fewer terminal nodes.
const RegressionTree& select_min_cost(const PrunedSequence& sequence);

double cart_rmse(const RegressionTree& tree, const RegressionSet& data);

}  // namespace tacds
