#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rankstab/ingest.hpp"
#include "rankstab/rankers.hpp"
#include "test_util.hpp"

using namespace rankstab;

namespace {

RankerSpec make_spec(RankerKind kind, std::map<std::string, double> hp = {}) {
    RankerSpec spec;
    spec.kind = kind;
    spec.hyperparameters = std::move(hp);
    return spec;
}

// three-feature logistic model with per-feature log-odds (c1, c2, c3)
Dataset logit3(std::size_t n, double c1, double c2, double c3, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    int pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal();
        const double b = rng.normal();
        const double c = rng.normal();
        const double prob = 1.0 / (1.0 + std::exp(-(c1 * a + c2 * b + c3 * c)));
        const int y = rng.bernoulli(prob) ? 1 : 0;
        rows.push_back({a, b, c});
        labels.push_back(y);
        pos += y;
    }
    if (pos == 0) labels[0] = 1;
    if (pos == static_cast<int>(n)) labels[0] = 0;
    return testutil::dataset_from(rows, labels);
}

// one near-label column in front of pure noise
Dataset label_plus_noise(std::size_t n, std::size_t p, double jitter, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = i % 2 == 0 ? 1 : 0;
        std::vector<double> row{static_cast<double>(y) + jitter * rng.normal()};
        for (std::size_t j = 1; j < p; ++j) row.push_back(rng.normal());
        rows.push_back(std::move(row));
        labels.push_back(y);
    }
    return testutil::dataset_from(rows, labels);
}

}  // namespace

TEST_SUITE("rankers") {

TEST_CASE("ranker spec validation and kind names") {
    CHECK_THROWS_AS(validate_ranker_spec(make_spec(RankerKind::Pearson, {{"junk", 1}})),
                    ConfigError);
    CHECK_THROWS_AS(validate_ranker_spec(make_spec(RankerKind::Relief, {{"n_neighbors", 0}})),
                    ConfigError);
    CHECK_THROWS_AS(
        validate_ranker_spec(make_spec(RankerKind::SvmRfe, {{"chunk_fraction", 1.5}})),
        ConfigError);
    CHECK_NOTHROW(validate_ranker_spec(make_spec(RankerKind::RandomForest, {{"n_trees", 10}})));
    for (RankerKind kind : {RankerKind::Pearson, RankerKind::Relief, RankerKind::SvmWrapper,
                            RankerKind::NnWrapper, RankerKind::SvmRfe, RankerKind::RandomForest})
        CHECK(ranker_kind_from_string(to_string(kind)) == kind);
    CHECK_THROWS_AS(ranker_kind_from_string("Lasso"), ConfigError);
}

TEST_CASE("pearson puts a label-equal feature first and breaks |corr| ties by index") {
    Rng rng(1);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 24; ++i) {
        const int y = i % 2;
        rows.push_back({static_cast<double>(y), 1.0 - static_cast<double>(y), rng.normal()});
        labels.push_back(y);
    }
    Dataset d = testutil::dataset_from(rows, labels);
    RankingVector r = rank_pearson(d);
    CHECK(r.ranks == std::vector<double>{1, 2, 3});
}

TEST_CASE("pearson ranks a constant feature last") {
    Rng rng(2);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) {
        const int y = i % 2;
        rows.push_back({static_cast<double>(y) + 0.4 * rng.normal(), 5.0});
        labels.push_back(y);
    }
    RankingVector r = rank_pearson(testutil::dataset_from(rows, labels));
    CHECK(r.ranks == std::vector<double>{1, 2});
}

TEST_CASE("pearson recovers the planted coefficient order in most seeds") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Dataset d = logit3(5000, 10.0, 1.0, 0.0, 1000 + seed);
        RankingVector r = rank_pearson(d);
        CHECK(r.is_permutation());
        if (r.ranks == std::vector<double>{1, 2, 3}) ++hits;
    }
    CHECK(hits >= 19);
}

TEST_CASE("pearson is invariant under positive affine feature transforms") {
    Dataset d = logit3(400, 2.0, 1.0, 0.3, 7);
    RankingVector base = rank_pearson(d);
    std::vector<double> warped = d.features();
    for (std::size_t i = 0; i < d.rows(); ++i) {
        warped[i * 3 + 0] = 3.0 * warped[i * 3 + 0] + 7.0;
        warped[i * 3 + 2] = 0.25 * warped[i * 3 + 2] - 2.0;
    }
    Dataset w(d.feature_names(), warped, d.labels());
    CHECK(rank_pearson(w).ranks == base.ranks);
    // a sign flip keeps |corr| too
    std::vector<double> flipped = d.features();
    for (std::size_t i = 0; i < d.rows(); ++i) flipped[i * 3 + 1] *= -2.0;
    Dataset f(d.feature_names(), flipped, d.labels());
    CHECK(rank_pearson(f).ranks == base.ranks);
}

TEST_CASE("pearson and relief ignore row order") {
    Dataset d = logit3(200, 1.5, 0.7, 0.2, 77);
    std::vector<std::size_t> perm(d.rows());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(3);
    rng.shuffle(perm);
    Dataset shuffled = d.select_rows(perm);

    CHECK(rank_pearson(d).ranks == rank_pearson(shuffled).ranks);

    std::vector<double> w1 = relief_weights(d, 10, 0, 0);
    std::vector<double> w2 = relief_weights(shuffled, 10, 0, 0);
    REQUIRE(w1.size() == w2.size());
    for (std::size_t j = 0; j < w1.size(); ++j) CHECK(std::abs(w1[j] - w2[j]) <= 1e-12);
    RankerSpec relief = make_spec(RankerKind::Relief);
    CHECK(rank_relief(d, relief, 0).ranks == rank_relief(shuffled, relief, 0).ranks);
}

TEST_CASE("relief gives constant features exactly zero weight, ranked last in index order") {
    Rng rng(4);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        const int y = i % 2;
        rows.push_back({2.0 * y + 0.1 * rng.normal(), 3.0, -1.0});
        labels.push_back(y);
    }
    Dataset d = testutil::dataset_from(rows, labels);
    std::vector<double> w = relief_weights(d, 10, 0, 0);
    CHECK(w[0] > 0.0);
    CHECK(w[1] == 0.0);
    CHECK(w[2] == 0.0);
    RankingVector r = rank_relief(d, make_spec(RankerKind::Relief), 0);
    CHECK(r.ranks == std::vector<double>{1, 2, 3});
}

TEST_CASE("relief separates a striped signal from noise in most seeds") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(500 + seed);
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (int i = 0; i < 80; ++i) {
            const int y = i % 2;
            rows.push_back({2.0 * y + 0.2 * rng.normal(), rng.normal()});
            labels.push_back(y);
        }
        RankingVector r =
            rank_relief(testutil::dataset_from(rows, labels), make_spec(RankerKind::Relief), 0);
        if (r.ranks[0] == 1.0) ++hits;
    }
    CHECK(hits >= 19);
}

TEST_CASE("relief sampling mode is deterministic per seed") {
    Dataset d = logit3(120, 1.0, 0.5, 0.0, 13);
    RankerSpec spec = make_spec(RankerKind::Relief, {{"sample_size", 30}});
    CHECK(rank_relief(d, spec, 5).ranks == rank_relief(d, spec, 5).ranks);
    std::vector<double> a = relief_weights(d, 10, 30, 5);
    std::vector<double> b = relief_weights(d, 10, 30, 6);
    CHECK(a != b);
}

TEST_CASE("svm wrapper selects the label-like feature first in most seeds") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Dataset d = label_plus_noise(60, 4, 0.05, 2000 + seed);
        RankingVector r = rank(make_spec(RankerKind::SvmWrapper), d, seed);
        CHECK(r.is_permutation());
        if (r.ranks[0] == 1.0) ++hits;
    }
    CHECK(hits >= 19);
}

TEST_CASE("wrapper with a single feature returns rank 1") {
    Dataset d = label_plus_noise(24, 1, 0.3, 3);
    CHECK(rank(make_spec(RankerKind::SvmWrapper), d, 1).ranks == std::vector<double>{1});
    CHECK(rank(make_spec(RankerKind::NnWrapper), d, 1).ranks == std::vector<double>{1});
}

TEST_CASE("an exact duplicate is deferred until independent signal is in") {
    // features 0 and 2 are two equally noisy views of the label; feature 1
    // is a byte-exact copy of feature 0. Neither view saturates AUC alone,
    // so the independent view strictly improves the candidate score while
    // the copy cannot, and ties between the copy and its original always
    // resolve to the lower index.
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(3000 + seed);
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (int i = 0; i < 100; ++i) {
            const int y = i % 2;
            const double s = y + 0.75 * rng.normal();
            const double t = y + 0.75 * rng.normal();
            rows.push_back({s, s, t, rng.normal()});
            labels.push_back(y);
        }
        Dataset d = testutil::dataset_from(rows, labels);
        RankingVector r = rank(make_spec(RankerKind::SvmWrapper), d, seed);
        CHECK((r.ranks[0] == 1.0 || r.ranks[2] == 1.0));
        CHECK(r.ranks[1] > r.ranks[0]);
        if (r.ranks[1] > r.ranks[2]) ++hits;
    }
    CHECK(hits >= 16);
}

TEST_CASE("nn wrapper finds a dominant feature") {
    Dataset d = label_plus_noise(36, 3, 0.05, 4);
    RankingVector r = rank(make_spec(RankerKind::NnWrapper), d, 11);
    CHECK(r.is_permutation());
    CHECK(r.ranks[0] == 1.0);
}

TEST_CASE("wrapper max_steps still yields a full permutation") {
    Dataset d = label_plus_noise(40, 5, 0.1, 9);
    RankerSpec spec = make_spec(RankerKind::SvmWrapper, {{"max_steps", 2}});
    RankingVector a = rank(spec, d, 21);
    CHECK(a.is_permutation());
    CHECK(a.ranks == rank(spec, d, 21).ranks);
}

TEST_CASE("svm-rfe keeps a label-equal feature to the end in most seeds") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Dataset d = label_plus_noise(80, 5, 0.05, 4000 + seed);
        RankingVector r = rank(make_spec(RankerKind::SvmRfe), d, seed);
        CHECK(r.is_permutation());
        if (r.ranks[0] == 1.0) ++hits;
    }
    CHECK(hits >= 19);
}

TEST_CASE("svm-rfe eliminates a constant feature first") {
    Rng rng(6);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
        const int y = i % 2;
        rows.push_back({y + 0.2 * rng.normal(), 7.0});
        labels.push_back(y);
    }
    Dataset d = testutil::dataset_from(rows, labels);
    CHECK(rank(make_spec(RankerKind::SvmRfe), d, 0).ranks == std::vector<double>{1, 2});
}

TEST_CASE("svm-rfe chunked elimination takes exactly three rounds for p=8") {
    Dataset d = label_plus_noise(40, 8, 0.2, 10);
    RfeTrace trace;
    RankerSpec spec = make_spec(RankerKind::SvmRfe, {{"chunk_fraction", 0.5}});
    RankingVector r = rank_svm_rfe(d, spec, 0, nullptr, &trace);
    CHECK(r.is_permutation());
    CHECK(trace.iterations == 3);  // 8 -> 4 -> 2 -> 1
    CHECK(trace.fallbacks == 0);
}

TEST_CASE("random forest ranks a perfectly splitting feature first in most seeds") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(5000 + seed);
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (int i = 0; i < 150; ++i) {
            const int y = i % 2;
            rows.push_back({static_cast<double>(y), rng.normal(), rng.normal(), rng.normal(),
                            rng.normal()});
            labels.push_back(y);
        }
        Dataset d = testutil::dataset_from(rows, labels);
        RankingVector r =
            rank(make_spec(RankerKind::RandomForest, {{"n_trees", 50}}), d, seed);
        CHECK(r.is_permutation());
        if (r.ranks[0] == 1.0) ++hits;
    }
    CHECK(hits >= 19);
}

TEST_CASE("random forest importance is uniform on pure noise") {
    const std::size_t p = 6;
    const int seeds = 50;
    std::vector<double> rank_sum(p, 0.0);
    for (int seed = 0; seed < seeds; ++seed) {
        Rng rng(6000 + seed);
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (int i = 0; i < 100; ++i) {
            std::vector<double> row;
            for (std::size_t j = 0; j < p; ++j) row.push_back(rng.normal());
            rows.push_back(std::move(row));
            labels.push_back(i % 2);
        }
        Dataset d = testutil::dataset_from(rows, labels);
        RankingVector r =
            rank(make_spec(RankerKind::RandomForest, {{"n_trees", 30}}), d, seed);
        for (std::size_t j = 0; j < p; ++j) rank_sum[j] += r.ranks[j];
    }
    // mean rank of a uniformly shuffled feature: (p+1)/2, sd sqrt((p^2-1)/12)/sqrt(seeds)
    const double center = 0.5 * (p + 1.0);
    const double sd = std::sqrt((p * p - 1.0) / 12.0 / seeds);
    for (std::size_t j = 0; j < p; ++j) {
        const double mean_rank = rank_sum[j] / seeds;
        CHECK(std::abs(mean_rank - center) <= 3.0 * sd + 0.05);
    }
}

TEST_CASE("random forest is deterministic per seed") {
    Dataset d = logit3(100, 1.0, 0.4, 0.1, 15);
    RankerSpec spec = make_spec(RankerKind::RandomForest, {{"n_trees", 40}, {"max_depth", 4}});
    CHECK(rank(spec, d, 9).ranks == rank(spec, d, 9).ranks);
}

TEST_CASE("run_ensemble collects K permutations over subsamples") {
    Dataset d = logit3(200, 2.0, 1.0, 0.0, 33);
    RankingEnsemble e = run_ensemble(make_spec(RankerKind::Pearson), d, 7, 0.7, 42);
    CHECK(e.runs() == 7);
    CHECK(e.features() == 3);
    CHECK(e.seeds.size() == 7);
    CHECK(e.ranker_name == "Pearson");
    for (const auto& r : e.rankings) CHECK(r.is_permutation());
    CHECK_THROWS_AS(run_ensemble(make_spec(RankerKind::Pearson), d, 1, 0.7, 42), ConfigError);
}

TEST_CASE("full-fraction ensembles of a deterministic ranker are constant") {
    Dataset d = logit3(80, 1.5, 0.5, 0.0, 44);
    RankingEnsemble e = run_ensemble(make_spec(RankerKind::Pearson), d, 4, 1.0, 5);
    for (const auto& r : e.rankings) CHECK(r.ranks == e.rankings[0].ranks);
}

TEST_CASE("ensembles are identical for any thread count") {
    Dataset d = logit3(150, 1.0, 0.6, 0.2, 55);
    RankerSpec forest = make_spec(RankerKind::RandomForest, {{"n_trees", 20}});
    RankingEnsemble a = run_ensemble(forest, d, 5, 0.7, 99, 1);
    RankingEnsemble b = run_ensemble(forest, d, 5, 0.7, 99, 4);
    RankingEnsemble c = run_ensemble(forest, d, 5, 0.7, 99, 0);
    CHECK(a.seeds == b.seeds);
    CHECK(a.seeds == c.seeds);
    for (std::size_t i = 0; i < a.runs(); ++i) {
        CHECK(a.rankings[i].ranks == b.rankings[i].ranks);
        CHECK(a.rankings[i].ranks == c.rankings[i].ranks);
    }
}

}  // TEST_SUITE
