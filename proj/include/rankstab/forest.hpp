#pragma once

#include <cstdint>
#include <vector>

#include "rankstab/common.hpp"

namespace rankstab {

struct ForestOptions {
    std::size_t n_trees = 200;
    std::size_t mtry = 0;       // 0 = floor(sqrt(p)), minimum 1
    std::size_t max_depth = 0;  // 0 = unlimited
};

// Mean decrease in Gini impurity per feature over a forest of trees grown on
// bootstrap samples, normalized to sum 1 (all zeros when nothing split).
std::vector<double> forest_importance(MatrixView x, const std::vector<int>& y,
                                      const ForestOptions& opt, std::uint64_t seed);

}  // namespace rankstab
