#include "rankstab/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rankstab {

namespace {

struct GiniSplit {
    double decrease = -1.0;  // impurity decrease weighted by node share
    std::size_t feature = 0;
    double threshold = 0.0;
};

double gini(std::size_t pos, std::size_t n) {
    if (n == 0) {
        return 0.0;
    }
    double q = static_cast<double>(pos) / static_cast<double>(n);
    return 2.0 * q * (1.0 - q);
}

// One tree's worth of importance, accumulated into `importance`.
void grow(MatrixView x, const std::vector<int>& y, std::vector<std::size_t>& rows,
          std::size_t depth, std::size_t max_depth, std::size_t mtry, Rng& rng,
          double inv_total, std::vector<double>& importance,
          std::vector<std::pair<double, std::size_t>>& scratch) {
    std::size_t n = rows.size();
    std::size_t pos = 0;
    for (std::size_t i : rows) {
        pos += static_cast<std::size_t>(y[i] == 1);
    }
    if (n < 2 || pos == 0 || pos == n || (max_depth > 0 && depth >= max_depth)) {
        return;
    }
    double node_gini = gini(pos, n);

    std::vector<std::size_t> feats = rng.sample_without_replacement(x.cols, mtry);
    // candidates are drawn in ascending order; scan them shuffled so equal
    // decreases do not systematically favor low feature indices
    rng.shuffle(feats);
    GiniSplit best;
    for (std::size_t j : feats) {
        scratch.clear();
        for (std::size_t i : rows) {
            scratch.push_back({x(i, j), i});
        }
        std::sort(scratch.begin(), scratch.end());
        std::size_t left_pos = 0;
        for (std::size_t t = 0; t + 1 < n; ++t) {
            left_pos += static_cast<std::size_t>(y[scratch[t].second] == 1);
            if (scratch[t + 1].first <= scratch[t].first) {
                continue;
            }
            std::size_t left_n = t + 1;
            std::size_t right_n = n - left_n;
            double child =
                (static_cast<double>(left_n) * gini(left_pos, left_n) +
                 static_cast<double>(right_n) * gini(pos - left_pos, right_n)) /
                static_cast<double>(n);
            double dec = node_gini - child;
            if (dec > best.decrease + 1e-15) {
                double thr = scratch[t].first + 0.5 * (scratch[t + 1].first - scratch[t].first);
                if (thr > scratch[t].first) {
                    best.decrease = dec;
                    best.feature = j;
                    best.threshold = thr;
                }
            }
        }
    }
    if (best.decrease <= 1e-15) {
        return;
    }
    importance[best.feature] += best.decrease * static_cast<double>(n) * inv_total;

    std::vector<std::size_t> left, right;
    for (std::size_t i : rows) {
        (x(i, best.feature) < best.threshold ? left : right).push_back(i);
    }
    rows.clear();
    rows.shrink_to_fit();
    grow(x, y, left, depth + 1, max_depth, mtry, rng, inv_total, importance, scratch);
    grow(x, y, right, depth + 1, max_depth, mtry, rng, inv_total, importance, scratch);
}

}  // namespace

std::vector<double> forest_importance(MatrixView x, const std::vector<int>& y,
                                      const ForestOptions& opt, std::uint64_t seed) {
    if (x.rows == 0 || y.size() != x.rows || x.cols == 0) {
        throw DataError("forest_importance: shape mismatch");
    }
    if (opt.n_trees == 0) {
        throw ConfigError("forest needs at least one tree");
    }
    std::size_t mtry = opt.mtry;
    if (mtry == 0) {
        mtry = static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols)));
    }
    mtry = std::clamp<std::size_t>(mtry, 1, x.cols);

    std::vector<double> importance(x.cols, 0.0);
    double inv_total = 1.0 / static_cast<double>(x.rows);
    std::vector<std::pair<double, std::size_t>> scratch;
    scratch.reserve(x.rows);
    for (std::size_t t = 0; t < opt.n_trees; ++t) {
        Rng rng(derive_seed(seed, "forest-tree", t));
        std::vector<std::size_t> rows(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) {
            rows[i] = rng.uniform_index(x.rows);
        }
        grow(x, y, rows, 0, opt.max_depth, mtry, rng, inv_total, importance, scratch);
    }

    double total = std::accumulate(importance.begin(), importance.end(), 0.0);
    if (total > 0.0) {
        for (double& v : importance) {
            v /= total;
        }
    }
    return importance;
}

}  // namespace rankstab
