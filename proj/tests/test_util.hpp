#pragma once

// Independent oracles and small builders shared by the unit and acceptance
// tests. Everything here is written the dumb direct way on purpose: these
// are the references the library is checked against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rankstab/common.hpp"
#include "rankstab/ingest.hpp"
#include "rankstab/mds.hpp"
#include "rankstab/types.hpp"

namespace testutil {

// O(cases * controls) pairwise AUC.
inline double brute_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) {
                wins += 1.0;
            } else if (scores[i] == scores[j]) {
                wins += 0.5;
            }
        }
    }
    return wins / pairs;
}

inline double brute_spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const double p = static_cast<double>(a.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return 1.0 - 6.0 * s / (p * (p * p - 1.0));
}

inline double brute_jaccard(const rankstab::TopKMask& s, const rankstab::TopKMask& s2) {
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < s.included.size(); ++i) {
        const bool x = s.included[i] != 0;
        const bool y = s2.included[i] != 0;
        inter += (x && y) ? 1 : 0;
        uni += (x || y) ? 1 : 0;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double brute_kuncheva(const rankstab::TopKMask& s, const rankstab::TopKMask& s2) {
    const double p = static_cast<double>(s.included.size());
    const double k = static_cast<double>(s.k);
    double o = 0.0;
    for (std::size_t i = 0; i < s.included.size(); ++i) {
        if (s.included[i] && s2.included[i]) o += 1.0;
    }
    return (o - k * k / p) / (k - k * k / p);
}

// Every nonempty mask over p features (k = popcount), p small.
inline std::vector<rankstab::TopKMask> all_masks(std::size_t p) {
    std::vector<rankstab::TopKMask> out;
    for (std::size_t bits = 1; bits < (std::size_t{1} << p); ++bits) {
        rankstab::TopKMask m;
        m.included.assign(p, 0);
        m.k = 0;
        for (std::size_t i = 0; i < p; ++i) {
            if (bits & (std::size_t{1} << i)) {
                m.included[i] = 1;
                ++m.k;
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

inline rankstab::RankingVector random_permutation(std::size_t p, rankstab::Rng& rng) {
    std::vector<double> r(p);
    std::iota(r.begin(), r.end(), 1.0);
    rng.shuffle(r);
    return rankstab::RankingVector{std::move(r)};
}

inline rankstab::Dataset dataset_from(const std::vector<std::vector<double>>& rows,
                                      const std::vector<int>& labels) {
    const std::size_t p = rows.front().size();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j + 1));
    std::vector<double> flat;
    flat.reserve(rows.size() * p);
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return rankstab::Dataset(std::move(names), std::move(flat), labels);
}

// Planted-signal case-control set; coefficients alternate sign.
inline rankstab::SyntheticResult planted(std::size_t n, std::size_t informative,
                                         std::size_t noise, double strength,
                                         std::uint64_t seed) {
    rankstab::SyntheticSpec spec;
    spec.n_instances = n;
    spec.n_informative = informative;
    spec.n_noise = noise;
    spec.n_redundant = 0;
    for (std::size_t i = 0; i < informative; ++i) {
        spec.coefficients.push_back((i % 2 == 0 ? 1.0 : -1.0) * strength);
    }
    spec.seed = seed;
    return rankstab::generate_synthetic(spec);
}

// Normalized stress of a candidate 2D layout against a dissimilarity matrix.
inline double stress_of(const std::vector<double>& coords, const rankstab::DissimilarityMatrix& d) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        for (std::size_t j = i + 1; j < d.n; ++j) {
            const double dx = coords[2 * i] - coords[2 * j];
            const double dy = coords[2 * i + 1] - coords[2 * j + 1];
            const double dist = std::sqrt(dx * dx + dy * dy);
            const double delta = d.at(i, j);
            num += (dist - delta) * (dist - delta);
            den += delta * delta;
        }
    }
    return den == 0.0 ? 0.0 : std::sqrt(num / den);
}

// Best rigid alignment (translation + rotation, reflection allowed) of a
// onto b; returns the max coordinate error after alignment. Both are n x 2.
inline double rigid_align_error(std::vector<double> a, std::vector<double> b, std::size_t n) {
    auto center = [&](std::vector<double>& c) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += c[2 * i];
            my += c[2 * i + 1];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            c[2 * i] -= mx;
            c[2 * i + 1] -= my;
        }
    };
    center(a);
    center(b);
    double best = std::numeric_limits<double>::infinity();
    for (int reflect = 0; reflect < 2; ++reflect) {
        std::vector<double> aa = a;
        if (reflect) {
            for (std::size_t i = 0; i < n; ++i) aa[2 * i + 1] = -aa[2 * i + 1];
        }
        double cross = 0.0, dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cross += aa[2 * i] * b[2 * i + 1] - aa[2 * i + 1] * b[2 * i];
            dot += aa[2 * i] * b[2 * i] + aa[2 * i + 1] * b[2 * i + 1];
        }
        const double t = std::atan2(cross, dot);
        const double ct = std::cos(t);
        const double st = std::sin(t);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = ct * aa[2 * i] - st * aa[2 * i + 1];
            const double y = st * aa[2 * i] + ct * aa[2 * i + 1];
            worst = std::max(worst, std::abs(x - b[2 * i]));
            worst = std::max(worst, std::abs(y - b[2 * i + 1]));
        }
        best = std::min(best, worst);
    }
    return best;
}

}  // namespace testutil
