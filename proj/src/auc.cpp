#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankstab/classifiers.hpp"

namespace rankstab {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DataError("auc: score/label length mismatch");
    const std::size_t n = scores.size();
    for (double s : scores)
        if (!std::isfinite(s)) throw DataError("auc: non-finite score");
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += static_cast<std::size_t>(y);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("auc undefined: single-class labels");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // rank sum of the positive class with midranks for ties
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t t = i; t < j; ++t)
            if (labels[order[t]] == 1) pos_rank_sum += midrank;
        i = j;
    }
    const double u = pos_rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    const double den = static_cast<double>(n_pos) * static_cast<double>(n_neg);
    // branch keeps auc(s,y) + auc(s,1-y) == 1 exact: the complement is formed
    // by an exact subtraction (Sterbenz) instead of a second rounded division
    if (2.0 * u >= den) return u / den;
    return 1.0 - (den - u) / den;
}

double accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                double threshold) {
    if (scores.size() != labels.size()) throw DataError("accuracy: score/label length mismatch");
    if (scores.empty()) throw DataError("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        int predicted = scores[i] > threshold ? 1 : 0;
        if (predicted == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(scores.size());
}

}  // namespace rankstab
