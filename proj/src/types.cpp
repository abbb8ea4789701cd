#include "rankstab/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace rankstab {

// --- common.hpp out-of-line pieces ---------------------------------------

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) throw ConfigError("sample_without_replacement: k > n");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + uniform_index(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    unsigned workers = std::min<std::size_t>(resolve_threads(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// --- Dataset --------------------------------------------------------------

Dataset::Dataset(std::vector<std::string> feature_names, std::vector<double> features,
                 std::vector<int> labels)
    : feature_names_(std::move(feature_names)),
      features_(std::move(features)),
      labels_(std::move(labels)) {
    const std::size_t p = feature_names_.size();
    if (p == 0) throw DataError("dataset has no features");
    if (features_.size() % p != 0)
        throw DataError("feature matrix size is not a multiple of the feature count");
    rows_ = features_.size() / p;
    if (rows_ == 0) throw DataError("dataset has no rows");
    if (labels_.size() != rows_) throw DataError("label count does not match row count");

    for (std::size_t j = 0; j < p; ++j) {
        if (feature_names_[j].empty()) throw DataError("empty feature name");
        for (std::size_t l = j + 1; l < p; ++l)
            if (feature_names_[j] == feature_names_[l])
                throw DataError("duplicate feature name: " + feature_names_[j]);
    }
    for (double v : features_)
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
    for (int y : labels_) {
        if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
        positives_ += static_cast<std::size_t>(y);
    }
    if (positives_ == 0 || positives_ == rows_)
        throw DataError("dataset must contain both classes");
}

std::vector<double> Dataset::column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = at(i, j);
    return out;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& idx) const {
    const std::size_t p = cols();
    std::vector<double> values;
    values.reserve(idx.size() * p);
    std::vector<int> y;
    y.reserve(idx.size());
    for (std::size_t i : idx) {
        if (i >= rows_) throw DataError("row index out of range");
        values.insert(values.end(), features_.begin() + i * p, features_.begin() + (i + 1) * p);
        y.push_back(labels_[i]);
    }
    return Dataset(feature_names_, std::move(values), std::move(y));
}

Dataset Dataset::select_features(const TopKMask& mask) const {
    if (mask.size() != cols()) throw DataError("mask length does not match feature count");
    std::vector<std::size_t> keep = mask.indices();
    std::vector<std::string> names;
    names.reserve(keep.size());
    for (std::size_t j : keep) names.push_back(feature_names_[j]);
    std::vector<double> values;
    values.reserve(rows_ * keep.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j : keep) values.push_back(at(i, j));
    return Dataset(std::move(names), std::move(values), labels_);
}

// --- rankings and masks -----------------------------------------------------

bool RankingVector::is_permutation() const {
    const std::size_t p = ranks.size();
    std::vector<bool> seen(p, false);
    for (double r : ranks) {
        double rounded = std::round(r);
        if (r != rounded || rounded < 1.0 || rounded > static_cast<double>(p)) return false;
        std::size_t slot = static_cast<std::size_t>(rounded) - 1;
        if (seen[slot]) return false;
        seen[slot] = true;
    }
    return true;
}

void validate_ranking(const RankingVector& r, bool require_permutation) {
    const std::size_t p = r.size();
    if (p == 0) throw DataError("empty ranking");
    for (double v : r.ranks)
        if (!std::isfinite(v) || v < 1.0 || v > static_cast<double>(p))
            throw DataError("rank outside [1, p]");
    if (require_permutation && !r.is_permutation())
        throw DataError("ranking is not a permutation of 1..p");
}

std::vector<std::size_t> TopKMask::indices() const {
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < included.size(); ++i)
        if (included[i]) out.push_back(i);
    return out;
}

TopKMask mask_from_indices(std::size_t p, const std::vector<std::size_t>& idx) {
    TopKMask mask;
    mask.included.assign(p, 0);
    for (std::size_t i : idx) {
        if (i >= p) throw DataError("mask index out of range");
        if (mask.included[i]) throw DataError("duplicate mask index");
        mask.included[i] = 1;
    }
    mask.k = idx.size();
    return mask;
}

RankingEnsemble make_ensemble(std::string ranker_name, std::vector<RankingVector> rankings,
                              std::vector<std::uint64_t> seeds) {
    if (rankings.size() < 2) throw DataError("ensemble requires K >= 2 rankings");
    const std::size_t p = rankings.front().size();
    for (const auto& r : rankings) {
        if (r.size() != p) throw DataError("ensemble rankings differ in feature count");
        validate_ranking(r);
    }
    if (seeds.size() != rankings.size()) throw DataError("ensemble seed count mismatch");
    return RankingEnsemble{std::move(ranker_name), std::move(rankings), std::move(seeds)};
}

TopKMask to_top_k(const RankingVector& r, std::size_t k) {
    const std::size_t p = r.size();
    validate_ranking(r);
    if (k < 1 || k > p) throw ConfigError("top-k cutoff out of range [1, p]");
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return r.ranks[a] < r.ranks[b]; });
    TopKMask mask;
    mask.included.assign(p, 0);
    for (std::size_t i = 0; i < k; ++i) mask.included[order[i]] = 1;
    mask.k = k;
    return mask;
}

RankingVector aggregate_median(const RankingEnsemble& e) {
    if (e.runs() < 2) throw DataError("aggregate_median requires K >= 2");
    const std::size_t p = e.features();
    const std::size_t runs = e.runs();
    RankingVector out;
    out.ranks.resize(p);
    std::vector<double> values(runs);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < runs; ++i) values[i] = e.rankings[i].ranks[j];
        std::sort(values.begin(), values.end());
        out.ranks[j] = (runs % 2 == 1) ? values[runs / 2]
                                       : 0.5 * (values[runs / 2 - 1] + values[runs / 2]);
    }
    return out;
}

}  // namespace rankstab
