#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankstab/rankers.hpp"

namespace rankstab {

namespace {

// features rescaled to [0,1]; constant columns become all zeros
std::vector<double> scale_unit_range(MatrixView x) {
    std::vector<double> lo(x.cols), hi(x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) {
        lo[j] = hi[j] = x(0, j);
    }
    for (std::size_t i = 1; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) {
            lo[j] = std::min(lo[j], x(i, j));
            hi[j] = std::max(hi[j], x(i, j));
        }
    }
    std::vector<double> out(x.rows * x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) {
            double range = hi[j] - lo[j];
            out[i * x.cols + j] = range > 0.0 ? (x(i, j) - lo[j]) / range : 0.0;
        }
    }
    return out;
}

}  // namespace

std::vector<double> relief_weights(const Dataset& d, std::size_t n_neighbors,
                                   std::size_t sample_size, std::uint64_t seed) {
    if (d.positives() < 2 || d.negatives() < 2) {
        throw DataError("relief needs at least 2 instances per class");
    }
    std::size_t m = d.rows(), p = d.cols();
    std::vector<double> xs = scale_unit_range(d.matrix());
    const std::vector<int>& y = d.labels();

    std::vector<std::size_t> visit;
    if (sample_size > 0 && sample_size < m) {
        Rng rng(seed);
        visit = rng.sample_without_replacement(m, sample_size);
    } else {
        visit.resize(m);
        std::iota(visit.begin(), visit.end(), std::size_t{0});
    }

    std::vector<double> weights(p, 0.0);
    std::vector<std::pair<double, std::size_t>> hits, misses;

    // Neighbors tied at the k-th distance share the remaining weight, so the
    // result does not depend on row order even when distances collide.
    auto accumulate = [&](std::vector<std::pair<double, std::size_t>>& group, const double* xi,
                          std::size_t k, double sign, double denom) {
        std::sort(group.begin(), group.end());
        double boundary = group[k - 1].first;
        std::size_t n_strict = 0;
        while (n_strict < group.size() && group[n_strict].first < boundary) {
            ++n_strict;
        }
        std::size_t n_tied = 0;
        while (n_strict + n_tied < group.size() && group[n_strict + n_tied].first == boundary) {
            ++n_tied;
        }
        double tied_share = (static_cast<double>(k) - static_cast<double>(n_strict)) /
                            static_cast<double>(n_tied);
        for (std::size_t t = 0; t < n_strict + n_tied; ++t) {
            double share = t < n_strict ? 1.0 : tied_share;
            const double* xo = xs.data() + group[t].second * p;
            for (std::size_t j = 0; j < p; ++j) {
                weights[j] += sign * share * std::abs(xi[j] - xo[j]) / denom;
            }
        }
    };

    for (std::size_t i : visit) {
        const double* xi = xs.data() + i * p;
        hits.clear();
        misses.clear();
        for (std::size_t o = 0; o < m; ++o) {
            if (o == i) {
                continue;
            }
            const double* xo = xs.data() + o * p;
            double dist = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                dist += std::abs(xi[j] - xo[j]);
            }
            (y[o] == y[i] ? hits : misses).push_back({dist, o});
        }
        std::size_t kh = std::min(n_neighbors, hits.size());
        std::size_t km = std::min(n_neighbors, misses.size());
        double mm = static_cast<double>(visit.size());
        accumulate(hits, xi, kh, -1.0, mm * static_cast<double>(kh));
        accumulate(misses, xi, km, 1.0, mm * static_cast<double>(km));
    }
    return weights;
}

RankingVector rank_relief(const Dataset& d, const RankerSpec& spec, std::uint64_t seed) {
    std::vector<double> w =
        relief_weights(d, static_cast<std::size_t>(spec.get("n_neighbors", 10)),
                       static_cast<std::size_t>(spec.get("sample_size", 0)), seed);
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    RankingVector r;
    r.ranks.resize(w.size());
    for (std::size_t t = 0; t < order.size(); ++t) {
        r.ranks[order[t]] = static_cast<double>(t + 1);
    }
    return r;
}

}  // namespace rankstab
