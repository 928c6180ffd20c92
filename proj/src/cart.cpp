#include "tacds/cart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tacds/rng.hpp"

namespace tacds {

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("RegressionTree: no nodes");
}

std::size_t RegressionTree::leaf_index(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes_[i].leaf) i = x[nodes_[i].variable] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
    return i;
}

double RegressionTree::predict(std::span<const double> x) const { return nodes_[leaf_index(x)].prediction; }

std::size_t RegressionTree::terminal_count() const {
    std::size_t count = 0;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const auto& n = nodes_[stack.back()];
        stack.pop_back();
        if (n.leaf) {
            ++count;
        } else {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    return count;
}

std::size_t RegressionTree::depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [i, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (!nodes_[i].leaf) {
            stack.emplace_back(nodes_[i].left, d + 1);
            stack.emplace_back(nodes_[i].right, d + 1);
        }
    }
    return best;
}

RegressionTree RegressionTree::collapsed(std::span<const std::size_t> nodes_to_collapse) const {
    std::vector<char> collapse(nodes_.size(), 0);
    for (std::size_t i : nodes_to_collapse) collapse.at(i) = 1;
    std::vector<TreeNode> out;
    // Pre-order copy keeps parents ahead of children.
    auto copy = [&](auto&& self, std::size_t i) -> std::size_t {
        const std::size_t id = out.size();
        out.push_back(nodes_[i]);
        if (nodes_[i].leaf || collapse[i]) {
            out[id].leaf = true;
            out[id].left = out[id].right = 0;
            out[id].variable = 0;
            out[id].threshold = 0.0;
            return id;
        }
        const std::size_t l = self(self, nodes_[i].left);
        const std::size_t r = self(self, nodes_[i].right);
        out[id].left = l;
        out[id].right = r;
        return id;
    };
    copy(copy, 0);
    return RegressionTree(std::move(out));
}

namespace {

struct NodeStats {
    double mean = 0.0;
    double sse = 0.0;
    bool constant = true;
};

// Summation over ascending targets makes the statistics independent of
// sample order.
NodeStats node_stats(const RegressionSet& data, std::span<const std::size_t> idx) {
    std::vector<double> ys(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) ys[i] = data.y(idx[i]);
    std::sort(ys.begin(), ys.end());
    NodeStats s;
    double sum = 0.0;
    for (double y : ys) sum += y;
    s.mean = sum / static_cast<double>(ys.size());
    for (double y : ys) s.sse += (y - s.mean) * (y - s.mean);
    s.constant = ys.front() == ys.back();
    return s;
}

struct Split {
    bool found = false;
    std::size_t variable = 0;
    double threshold = 0.0;
    double sse = 0.0;
};

Split best_split(const RegressionSet& data, std::span<const std::size_t> idx, const NodeStats& stats,
                 std::size_t min_leaf) {
    const std::size_t n = idx.size();
    const double tol = 1e-12 * stats.sse;
    Split best;
    best.sse = stats.sse - tol;  // a split must reduce SSE
    std::vector<std::size_t> order(idx.begin(), idx.end());
    std::vector<double> s1(n + 1), s2(n + 1);
    for (std::size_t v = 0; v < data.dim(); ++v) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double xa = data.inputs(a, v), xb = data.inputs(b, v);
            if (xa != xb) return xa < xb;
            return data.y(a) < data.y(b);
        });
        for (std::size_t i = 0; i < n; ++i) {
            const double c = data.y(order[i]) - stats.mean;
            s1[i + 1] = s1[i] + c;
            s2[i + 1] = s2[i] + c * c;
        }
        for (std::size_t i = min_leaf; i + min_leaf <= n; ++i) {
            const double lo = data.inputs(order[i - 1], v);
            const double hi = data.inputs(order[i], v);
            if (!(lo < hi)) continue;
            const double nl = static_cast<double>(i);
            const double nr = static_cast<double>(n - i);
            const double left = std::max(0.0, s2[i] - s1[i] * s1[i] / nl);
            const double rs1 = s1[n] - s1[i];
            const double right = std::max(0.0, (s2[n] - s2[i]) - rs1 * rs1 / nr);
            const double total = left + right;
            if (total < best.sse - (best.found ? tol : 0.0)) {
                best.found = true;
                best.variable = v;
                best.sse = total;
                double t = 0.5 * (lo + hi);
                if (!(t < hi)) t = lo;
                best.threshold = t;
            }
        }
    }
    return best;
}

std::size_t build(const RegressionSet& data, std::vector<std::size_t> idx, std::size_t min_leaf,
                  std::vector<TreeNode>& nodes) {
    const NodeStats stats = node_stats(data, idx);
    const std::size_t id = nodes.size();
    TreeNode node;
    node.prediction = stats.mean;
    node.sample_count = idx.size();
    node.sse = stats.sse;
    nodes.push_back(node);
    if (stats.constant || idx.size() < 2 * min_leaf) return id;

    const Split split = best_split(data, idx, stats, min_leaf);
    if (!split.found) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) (data.inputs(i, split.variable) <= split.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    nodes[id].leaf = false;
    nodes[id].variable = split.variable;
    nodes[id].threshold = split.threshold;
    const std::size_t l = build(data, std::move(left), min_leaf, nodes);
    const std::size_t r = build(data, std::move(right), min_leaf, nodes);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
}

}  // namespace

RegressionTree grow(const RegressionSet& data, std::size_t min_leaf) {
    if (data.size() == 0) throw std::invalid_argument("grow: empty data");
    if (min_leaf < 1) throw std::invalid_argument("grow: min_leaf must be >= 1");
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<TreeNode> nodes;
    build(data, std::move(idx), min_leaf, nodes);
    return RegressionTree(std::move(nodes));
}

PrunedSequence weakest_link_sequence(const RegressionTree& tree) {
    PrunedSequence seq;
    RegressionTree current = tree;
    seq.entries.push_back({0.0, current, current.terminal_count(), 0.0});
    while (!current.root().leaf) {
        const auto& nodes = current.nodes();
        const std::size_t n = nodes.size();
        std::vector<double> leaf_sse(n, 0.0);
        std::vector<std::size_t> leaves(n, 0);
        // Children always follow their parent, so a reverse sweep is post-order.
        for (std::size_t i = n; i-- > 0;) {
            if (nodes[i].leaf) {
                leaf_sse[i] = nodes[i].sse;
                leaves[i] = 1;
            } else {
                leaf_sse[i] = leaf_sse[nodes[i].left] + leaf_sse[nodes[i].right];
                leaves[i] = leaves[nodes[i].left] + leaves[nodes[i].right];
            }
        }
        double g_min = std::numeric_limits<double>::infinity();
        std::vector<double> g(n, std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < n; ++i) {
            if (nodes[i].leaf) continue;
            g[i] = (nodes[i].sse - leaf_sse[i]) / static_cast<double>(leaves[i] - 1);
            g_min = std::min(g_min, g[i]);
        }
        const double cutoff = g_min + 1e-12 * std::abs(g_min);
        std::vector<std::size_t> weakest;
        for (std::size_t i = 0; i < n; ++i)
            if (g[i] <= cutoff) weakest.push_back(i);
        current = current.collapsed(weakest);
        const double alpha = std::max(g_min, 0.0);
        if (alpha <= seq.entries.back().alpha && seq.entries.size() > 1) {
            seq.entries.back().tree = current;
            seq.entries.back().terminal_count = current.terminal_count();
        } else {
            seq.entries.push_back({std::max(alpha, std::nextafter(seq.entries.back().alpha, 1.0)), current,
                                   current.terminal_count(), 0.0});
        }
    }
    return seq;
}

namespace {

const RegressionTree& subtree_for_alpha(const PrunedSequence& seq, double alpha) {
    std::size_t j = 0;
    while (j + 1 < seq.entries.size() && seq.entries[j + 1].alpha <= alpha) ++j;
    return seq.entries[j].tree;
}

RegressionSet subset(const RegressionSet& data, std::span<const std::size_t> idx) {
    Matrix x(idx.size(), data.dim());
    Vector y(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        std::copy(data.x(idx[i]).begin(), data.x(idx[i]).end(), x.row(i).begin());
        y[i] = data.y(idx[i]);
    }
    return {std::move(x), std::move(y)};
}

}  // namespace

PrunedSequence prune_sequence(const RegressionTree& tree, const RegressionSet& data, const CartOptions& options) {
    PrunedSequence seq = weakest_link_sequence(tree);
    const std::size_t n = data.size();
    const std::size_t folds = std::min(options.folds, n);
    if (folds < 2) return seq;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(options.seed);
    rng.shuffle(order.begin(), order.end());
    std::vector<std::size_t> fold_of(n);
    for (std::size_t p = 0; p < n; ++p) fold_of[order[p]] = p % folds;

    const std::size_t k_count = seq.entries.size();
    std::vector<double> representative(k_count);
    for (std::size_t k = 0; k < k_count; ++k)
        representative[k] = k + 1 < k_count ? std::sqrt(seq.entries[k].alpha * seq.entries[k + 1].alpha)
                                             : std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> fold_sse(folds, std::vector<double>(k_count, 0.0));
    const auto folds_signed = static_cast<long>(folds);
#pragma omp parallel for schedule(dynamic)
    for (long f = 0; f < folds_signed; ++f) {
        std::vector<std::size_t> train_idx, held_idx;
        for (std::size_t i = 0; i < n; ++i) (fold_of[i] == static_cast<std::size_t>(f) ? held_idx : train_idx).push_back(i);
        const RegressionSet train = subset(data, train_idx);
        const PrunedSequence fold_seq = weakest_link_sequence(grow(train, options.min_leaf));
        for (std::size_t k = 0; k < k_count; ++k) {
            const RegressionTree& t = subtree_for_alpha(fold_seq, representative[k]);
            double sse = 0.0;
            for (std::size_t i : held_idx) {
                const double r = t.predict(data.x(i)) - data.y(i);
                sse += r * r;
            }
            fold_sse[f][k] = sse;
        }
    }
    for (std::size_t k = 0; k < k_count; ++k) {
        double total = 0.0;
        for (std::size_t f = 0; f < folds; ++f) total += fold_sse[f][k];
        seq.entries[k].cv_cost = total / static_cast<double>(n);
    }
    return seq;
}

const RegressionTree& select_min_cost(const PrunedSequence& sequence) {
    if (sequence.entries.empty()) throw std::invalid_argument("select_min_cost: empty sequence");
    std::size_t best = 0;
    for (std::size_t k = 1; k < sequence.entries.size(); ++k) {
        const auto& e = sequence.entries[k];
        const auto& b = sequence.entries[best];
        const double tol = 1e-12 * std::max(std::abs(e.cv_cost), std::abs(b.cv_cost));
        if (e.cv_cost < b.cv_cost - tol ||
            (std::abs(e.cv_cost - b.cv_cost) <= tol && e.terminal_count < b.terminal_count))
            best = k;
    }
    return sequence.entries[best].tree;
}

double cart_rmse(const RegressionTree& tree, const RegressionSet& data) {
    double sse = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = tree.predict(data.x(i)) - data.y(i);
        sse += r * r;
    }
    return rmse_from_sse(sse, data.size());
}

}  // namespace tacds
