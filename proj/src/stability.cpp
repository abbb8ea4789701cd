#include "rankstab/stability.hpp"

#include <algorithm>
#include <numeric>

namespace rankstab {

std::string to_string(StabilityMetric metric) {
    switch (metric) {
        case StabilityMetric::Spearman: return "Spearman";
        case StabilityMetric::Jaccard: return "Jaccard";
        case StabilityMetric::Kuncheva: return "Kuncheva";
    }
    return "Spearman";
}

StabilityMetric stability_metric_from_string(const std::string& name) {
    if (name == "Spearman") return StabilityMetric::Spearman;
    if (name == "Jaccard") return StabilityMetric::Jaccard;
    if (name == "Kuncheva") return StabilityMetric::Kuncheva;
    throw ConfigError("unknown stability metric: " + name);
}

double spearman(const RankingVector& r, const RankingVector& r2) {
    std::size_t p = r.size();
    if (p != r2.size()) {
        throw DataError("spearman: rankings differ in length");
    }
    if (p < 2) {
        throw DataError("spearman needs at least 2 features");
    }
    validate_ranking(r);
    validate_ranking(r2);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        double d = r.ranks[i] - r2.ranks[i];
        sum_sq += d * d;
    }
    double pd = static_cast<double>(p);
    return 1.0 - 6.0 * sum_sq / (pd * (pd * pd - 1.0));
}

double jaccard(const TopKMask& s, const TopKMask& s2) {
    if (s.size() != s2.size()) {
        throw DataError("jaccard: masks differ in length");
    }
    std::size_t both = 0, either = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        bool a = s.included[i] != 0;
        bool b = s2.included[i] != 0;
        both += static_cast<std::size_t>(a && b);
        either += static_cast<std::size_t>(a || b);
    }
    if (either == 0) {
        return 1.0;
    }
    return static_cast<double>(both) / static_cast<double>(either);
}

double kuncheva(const TopKMask& s, const TopKMask& s2) {
    if (s.size() != s2.size()) {
        throw DataError("kuncheva: masks differ in length");
    }
    if (s.k != s2.k) {
        throw DataError("kuncheva: masks differ in k");
    }
    std::size_t p = s.size();
    std::size_t k = s.k;
    if (k == 0 || k >= p) {
        throw ConfigError("kuncheva undefined for k = 0 or k = p");
    }
    std::size_t o = 0;
    for (std::size_t i = 0; i < p; ++i) {
        o += static_cast<std::size_t>(s.included[i] != 0 && s2.included[i] != 0);
    }
    double kk = static_cast<double>(k);
    double expected = kk * kk / static_cast<double>(p);
    return (static_cast<double>(o) - expected) / (kk - expected);
}

StabilityScore ensemble_stability(const RankingEnsemble& e, StabilityMetric metric,
                                  std::size_t k) {
    std::size_t runs = e.runs();
    if (runs < 2) {
        throw DataError("ensemble_stability needs at least 2 runs");
    }
    bool set_metric = metric != StabilityMetric::Spearman;
    if (set_metric && k == 0) {
        throw ConfigError("set-based stability metrics need k");
    }
    std::vector<TopKMask> masks;
    if (set_metric) {
        masks.reserve(runs);
        for (const RankingVector& r : e.rankings) {
            masks.push_back(to_top_k(r, k));
        }
    }
    StabilityScore score;
    score.metric = metric;
    score.k = set_metric ? k : 0;
    score.runs = runs;
    score.pairwise.assign(runs * runs, 0.0);
    double total = 0.0;
    for (std::size_t a = 0; a < runs; ++a) {
        for (std::size_t b = a; b < runs; ++b) {
            double v;
            switch (metric) {
                case StabilityMetric::Spearman: v = spearman(e.rankings[a], e.rankings[b]); break;
                case StabilityMetric::Jaccard: v = jaccard(masks[a], masks[b]); break;
                default: v = kuncheva(masks[a], masks[b]); break;
            }
            score.pairwise[a * runs + b] = v;
            score.pairwise[b * runs + a] = v;
            if (b > a) {
                total += v;
            }
        }
    }
    score.value = total / (static_cast<double>(runs) * static_cast<double>(runs - 1) / 2.0);
    return score;
}

JaccardProfile jaccard_profile(const RankingEnsemble& e, const std::vector<std::size_t>& ks) {
    std::size_t p = e.features();
    std::size_t runs = e.runs();
    if (runs < 2) {
        throw DataError("jaccard_profile needs at least 2 runs");
    }
    for (std::size_t k : ks) {
        if (k < 1 || k > p) {
            throw ConfigError("jaccard_profile: k out of range");
        }
    }
    JaccardProfile profile;
    for (std::size_t k : ks) {
        profile.points.push_back({k, ensemble_stability(e, StabilityMetric::Jaccard, k).value});
    }

    // mean over every k: one incremental sweep per run pair
    std::vector<std::vector<std::size_t>> order(runs);
    for (std::size_t a = 0; a < runs; ++a) {
        const RankingVector& r = e.rankings[a];
        validate_ranking(r);
        order[a].resize(p);
        std::iota(order[a].begin(), order[a].end(), std::size_t{0});
        std::stable_sort(order[a].begin(), order[a].end(), [&](std::size_t x, std::size_t y) {
            return r.ranks[x] < r.ranks[y];
        });
    }
    double grand = 0.0;
    std::vector<char> in_a(p), in_b(p);
    for (std::size_t a = 0; a < runs; ++a) {
        for (std::size_t b = a + 1; b < runs; ++b) {
            std::fill(in_a.begin(), in_a.end(), 0);
            std::fill(in_b.begin(), in_b.end(), 0);
            std::size_t common = 0;
            double pair_sum = 0.0;
            for (std::size_t k = 1; k <= p; ++k) {
                std::size_t fa = order[a][k - 1];
                std::size_t fb = order[b][k - 1];
                if (in_b[fa]) {
                    ++common;
                }
                in_a[fa] = 1;
                if (in_a[fb]) {
                    ++common;
                }
                in_b[fb] = 1;
                pair_sum += static_cast<double>(common) /
                            static_cast<double>(2 * k - common);
            }
            grand += pair_sum / static_cast<double>(p);
        }
    }
    profile.mean_over_all_k =
        grand / (static_cast<double>(runs) * static_cast<double>(runs - 1) / 2.0);
    return profile;
}

}  // namespace rankstab
