#include "rankstab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rankstab {

namespace {

struct SplitChoice {
    double gain = -1.0;
    int feature = -1;
    double threshold = 0.0;
};

struct OpenLeaf {
    int node = -1;
    std::vector<std::size_t> rows;
    SplitChoice split;
};

// Best SSE-reduction split over the given rows; sorted_cols holds, per
// feature, all row indices of the full matrix in ascending value order.
SplitChoice best_split(MatrixView x, const std::vector<double>& target,
                       const std::vector<std::vector<std::size_t>>& sorted_cols,
                       const std::vector<char>& member, std::size_t n_rows, double sum_all) {
    SplitChoice best;
    if (n_rows < 2) {
        return best;
    }
    double base = sum_all * sum_all / static_cast<double>(n_rows);
    for (std::size_t j = 0; j < x.cols; ++j) {
        const std::vector<std::size_t>& order = sorted_cols[j];
        double left_sum = 0.0;
        std::size_t left_n = 0;
        double prev_val = 0.0;
        bool have_prev = false;
        for (std::size_t idx : order) {
            if (!member[idx]) {
                continue;
            }
            double v = x(idx, j);
            if (have_prev && v > prev_val && left_n > 0 && left_n < n_rows) {
                double right_sum = sum_all - left_sum;
                std::size_t right_n = n_rows - left_n;
                double gain = left_sum * left_sum / static_cast<double>(left_n) +
                              right_sum * right_sum / static_cast<double>(right_n) - base;
                double thr = prev_val + 0.5 * (v - prev_val);
                if (thr > prev_val && gain > best.gain + 1e-12) {
                    best.gain = gain;
                    best.feature = static_cast<int>(j);
                    best.threshold = thr;
                }
            }
            left_sum += target[idx];
            ++left_n;
            prev_val = v;
            have_prev = true;
        }
    }
    if (best.gain <= 1e-12) {
        best.feature = -1;
        best.gain = -1.0;
    }
    return best;
}

}  // namespace

RegressionTree RegressionTree::fit(MatrixView x, const std::vector<double>& target,
                                   std::size_t max_splits) {
    if (x.rows == 0 || target.size() != x.rows || x.cols == 0) {
        throw DataError("RegressionTree::fit: shape mismatch");
    }
    std::vector<std::vector<std::size_t>> sorted_cols(x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) {
        sorted_cols[j].resize(x.rows);
        std::iota(sorted_cols[j].begin(), sorted_cols[j].end(), std::size_t{0});
        std::stable_sort(sorted_cols[j].begin(), sorted_cols[j].end(),
                         [&](std::size_t a, std::size_t b) { return x(a, j) < x(b, j); });
    }

    RegressionTree tree;
    std::vector<char> member(x.rows, 1);
    std::vector<std::size_t> all(x.rows);
    std::iota(all.begin(), all.end(), std::size_t{0});
    double total = std::accumulate(target.begin(), target.end(), 0.0);

    tree.nodes_.push_back(TreeNode{});
    tree.nodes_[0].value = total / static_cast<double>(x.rows);

    std::vector<OpenLeaf> open;
    {
        OpenLeaf root;
        root.node = 0;
        root.rows = std::move(all);
        root.split = best_split(x, target, sorted_cols, member, x.rows, total);
        open.push_back(std::move(root));
    }

    std::size_t splits = 0;
    while (splits < max_splits) {
        // pick the expandable leaf with the largest gain, earliest first
        std::size_t pick = open.size();
        double best_gain = 0.0;
        for (std::size_t i = 0; i < open.size(); ++i) {
            if (open[i].split.feature >= 0 && open[i].split.gain > best_gain + 1e-12) {
                best_gain = open[i].split.gain;
                pick = i;
            }
        }
        if (pick == open.size()) {
            break;
        }
        OpenLeaf leaf = std::move(open[pick]);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));

        TreeNode& parent = tree.nodes_[static_cast<std::size_t>(leaf.node)];
        parent.feature = leaf.split.feature;
        parent.threshold = leaf.split.threshold;

        OpenLeaf lo, hi;
        double lo_sum = 0.0, hi_sum = 0.0;
        for (std::size_t idx : leaf.rows) {
            if (x(idx, static_cast<std::size_t>(leaf.split.feature)) < leaf.split.threshold) {
                lo.rows.push_back(idx);
                lo_sum += target[idx];
            } else {
                hi.rows.push_back(idx);
                hi_sum += target[idx];
            }
        }

        int lo_id = static_cast<int>(tree.nodes_.size());
        tree.nodes_.push_back(TreeNode{});
        int hi_id = static_cast<int>(tree.nodes_.size());
        tree.nodes_.push_back(TreeNode{});
        tree.nodes_[static_cast<std::size_t>(leaf.node)].left = lo_id;
        tree.nodes_[static_cast<std::size_t>(leaf.node)].right = hi_id;
        tree.nodes_[static_cast<std::size_t>(lo_id)].value =
            lo_sum / static_cast<double>(lo.rows.size());
        tree.nodes_[static_cast<std::size_t>(hi_id)].value =
            hi_sum / static_cast<double>(hi.rows.size());
        lo.node = lo_id;
        hi.node = hi_id;

        // membership masks are evaluated against the candidate leaf's rows
        for (std::size_t idx : leaf.rows) {
            member[idx] = 0;
        }
        for (std::size_t idx : lo.rows) {
            member[idx] = 1;
        }
        lo.split = best_split(x, target, sorted_cols, member, lo.rows.size(), lo_sum);
        for (std::size_t idx : lo.rows) {
            member[idx] = 0;
        }
        for (std::size_t idx : hi.rows) {
            member[idx] = 1;
        }
        hi.split = best_split(x, target, sorted_cols, member, hi.rows.size(), hi_sum);
        for (std::size_t idx : leaf.rows) {
            member[idx] = 1;
        }

        open.push_back(std::move(lo));
        open.push_back(std::move(hi));
        ++splits;
    }

    for (TreeNode& node : tree.nodes_) {
        if (node.feature < 0) {
            node.leaf_id = static_cast<int>(tree.leaves_++);
        }
    }
    return tree;
}

double RegressionTree::predict(const double* row) const {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
        at = static_cast<std::size_t>(row[nodes_[at].feature] < nodes_[at].threshold
                                          ? nodes_[at].left
                                          : nodes_[at].right);
    }
    return nodes_[at].value;
}

std::size_t RegressionTree::leaf_of(const double* row) const {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
        at = static_cast<std::size_t>(row[nodes_[at].feature] < nodes_[at].threshold
                                          ? nodes_[at].left
                                          : nodes_[at].right);
    }
    return static_cast<std::size_t>(nodes_[at].leaf_id);
}

BoostedTrees BoostedTrees::fit(MatrixView x, const std::vector<int>& y01, std::size_t rounds,
                               double learn_rate, std::size_t max_splits) {
    std::size_t n = x.rows;
    if (n == 0 || y01.size() != n) {
        throw DataError("BoostedTrees::fit: shape mismatch");
    }
    std::size_t n_pos = 0;
    for (int v : y01) {
        n_pos += static_cast<std::size_t>(v == 1);
    }
    std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw DataError("BoostedTrees::fit: needs both classes");
    }

    BoostedTrees model;
    model.prior = 0.5 * std::log(static_cast<double>(n_pos) / static_cast<double>(n_neg));
    std::vector<double> y(n);
    std::vector<double> f(n, model.prior);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = y01[i] == 1 ? 1.0 : -1.0;
    }

    const double eps = 1e-10;
    std::vector<double> resid(n);
    for (std::size_t round = 0; round < rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] = y[i] * std::exp(-y[i] * f[i]);
        }
        RegressionTree tree = RegressionTree::fit(x, resid, max_splits);

        // per-leaf line search on the exponential loss, smoothed and clipped
        std::size_t leaves = tree.leaf_count();
        std::vector<double> w_pos(leaves, 0.0), w_neg(leaves, 0.0);
        std::vector<std::size_t> leaf_ids(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t leaf = tree.leaf_of(x.row(i));
            leaf_ids[i] = leaf;
            double w = std::exp(-y[i] * f[i]);
            (y[i] > 0.0 ? w_pos[leaf] : w_neg[leaf]) += w;
        }
        std::vector<double> gamma(leaves);
        for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
            double g = 0.5 * std::log((w_pos[leaf] + eps) / (w_neg[leaf] + eps));
            gamma[leaf] = std::clamp(g, -15.0, 15.0) * learn_rate;
        }
        for (TreeNode& node : tree.nodes()) {
            if (node.leaf_id >= 0) {
                node.value = gamma[static_cast<std::size_t>(node.leaf_id)];
            }
        }
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            f[i] += gamma[leaf_ids[i]];
            loss += std::exp(-y[i] * f[i]);
        }
        model.loss_history.push_back(loss / static_cast<double>(n));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

double BoostedTrees::decision(const double* row) const {
    double f = prior;
    for (const RegressionTree& tree : trees) {
        f += tree.predict(row);
    }
    return f;
}

std::vector<double> BoostedTrees::decision_values(MatrixView x) const {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        out[i] = decision(x.row(i));
    }
    return out;
}

}  // namespace rankstab
