#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankstab/types.hpp"

namespace rankstab {

enum class StabilityMetric { Spearman, Jaccard, Kuncheva };

std::string to_string(StabilityMetric metric);
StabilityMetric stability_metric_from_string(const std::string& name);

// 1 - 6*sum(d^2)/(p(p^2-1)); tied (aggregated) rank values go through the
// same formula uncorrected.
double spearman(const RankingVector& r, const RankingVector& r2);

// |intersection| / |union|; 1 when both masks are empty.
double jaccard(const TopKMask& s, const TopKMask& s2);

// (o - k^2/p) / (k - k^2/p) with o = |intersection|; needs 0 < k < p.
double kuncheva(const TopKMask& s, const TopKMask& s2);

struct StabilityScore {
    StabilityMetric metric = StabilityMetric::Spearman;
    double value = 0.0;        // mean of the strict upper triangle
    std::size_t k = 0;         // 0 for rank-based metrics
    std::vector<double> pairwise;  // K x K row-major, symmetric, unit diagonal
    std::size_t runs = 0;
};

// Mean pairwise similarity over all K(K-1)/2 run pairs; set metrics convert
// each ranking with to_top_k(k) first.
StabilityScore ensemble_stability(const RankingEnsemble& e, StabilityMetric metric,
                                  std::size_t k = 0);

struct JaccardProfile {
    std::vector<std::pair<std::size_t, double>> points;  // (k, mean Jaccard)
    double mean_over_all_k = 0.0;                        // k swept 1..p
};

JaccardProfile jaccard_profile(const RankingEnsemble& e, const std::vector<std::size_t>& ks);

}  // namespace rankstab
