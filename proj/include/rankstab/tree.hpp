#pragma once

#include <cstdint>
#include <vector>

#include "rankstab/common.hpp"

namespace rankstab {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    int leaf_id = -1;
};

// Least-squares regression tree grown best-first up to max_splits internal
// nodes. Split thresholds are midpoints between consecutive distinct values;
// ties in gain prefer the lower feature index, then the lower threshold, and
// among expandable leaves the earliest-created node.
class RegressionTree {
public:
    static RegressionTree fit(MatrixView x, const std::vector<double>& target,
                              std::size_t max_splits);

    double predict(const double* row) const;
    std::size_t leaf_of(const double* row) const;  // dense leaf id
    std::size_t leaf_count() const { return leaves_; }
    std::vector<TreeNode>& nodes() { return nodes_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

private:
    std::vector<TreeNode> nodes_;
    std::size_t leaves_ = 0;
};

// AdaBoost over regression trees fitted to exponential-loss pseudo-residuals.
// Leaf values already include the shrinkage factor, so the decision value is
// prior + sum of tree predictions. loss_history[t] is the mean training
// exponential loss after round t and is non-increasing by construction.
struct BoostedTrees {
    double prior = 0.0;
    std::vector<RegressionTree> trees;
    std::vector<double> loss_history;

    static BoostedTrees fit(MatrixView x, const std::vector<int>& y01, std::size_t rounds,
                            double learn_rate, std::size_t max_splits);

    double decision(const double* row) const;
    std::vector<double> decision_values(MatrixView x) const;
};

}  // namespace rankstab
