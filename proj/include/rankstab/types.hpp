#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankstab/common.hpp"

namespace rankstab {

struct TopKMask;

// Labeled case-control table: M rows of p finite features, labels in {0,1}.
// Immutable after construction; the constructor enforces the invariants.
class Dataset {
public:
    Dataset(std::vector<std::string> feature_names, std::vector<double> features,
            std::vector<int> labels);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return feature_names_.size(); }
    double at(std::size_t i, std::size_t j) const { return features_[i * cols() + j]; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<double>& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }
    MatrixView matrix() const { return {features_.data(), rows_, cols()}; }

    std::size_t positives() const { return positives_; }
    std::size_t negatives() const { return rows_ - positives_; }

    std::vector<double> column(std::size_t j) const;
    Dataset select_rows(const std::vector<std::size_t>& idx) const;
    Dataset select_features(const TopKMask& mask) const;

private:
    std::vector<std::string> feature_names_;
    std::vector<double> features_;  // row-major rows_ x p
    std::vector<int> labels_;
    std::size_t rows_ = 0;
    std::size_t positives_ = 0;
};

// Rank assignment over p features, rank 1 = most relevant. Raw ranker output
// is a permutation of 1..p; aggregated rankings may carry fractional ties.
struct RankingVector {
    std::vector<double> ranks;

    std::size_t size() const { return ranks.size(); }
    bool is_permutation() const;
};

// Throws DataError unless every rank lies in [1, p] (and, when
// require_permutation, the ranks are exactly a permutation of 1..p).
void validate_ranking(const RankingVector& r, bool require_permutation = false);

// Binary inclusion vector with exactly k ones.
struct TopKMask {
    std::vector<std::uint8_t> included;
    std::size_t k = 0;

    std::size_t size() const { return included.size(); }
    std::vector<std::size_t> indices() const;
};

TopKMask mask_from_indices(std::size_t p, const std::vector<std::size_t>& idx);

// K rankings of the same p features from repeated runs of one ranker.
struct RankingEnsemble {
    std::string ranker_name;
    std::vector<RankingVector> rankings;
    std::vector<std::uint64_t> seeds;

    std::size_t runs() const { return rankings.size(); }
    std::size_t features() const { return rankings.empty() ? 0 : rankings.front().size(); }
};

RankingEnsemble make_ensemble(std::string ranker_name, std::vector<RankingVector> rankings,
                              std::vector<std::uint64_t> seeds);

// Selects the k best-ranked features; ties at the k boundary are broken by
// ascending feature index.
TopKMask to_top_k(const RankingVector& r, std::size_t k);

// Per-feature median of ranks across the runs. The result is not re-ranked
// to a permutation; downstream top-k conversion handles ties.
RankingVector aggregate_median(const RankingEnsemble& e);

}  // namespace rankstab
