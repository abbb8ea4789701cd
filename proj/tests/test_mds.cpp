#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "rankstab/mds.hpp"
#include "rankstab/stability.hpp"
#include "test_util.hpp"

using namespace rankstab;

namespace {

DissimilarityMatrix matrix_from(std::size_t n, const std::vector<double>& values) {
    DissimilarityMatrix d;
    d.n = n;
    d.values = values;
    for (std::size_t i = 0; i < n; ++i) d.labels.push_back({"m", i + 1});
    return d;
}

DissimilarityMatrix distances_of(const std::vector<double>& coords, std::size_t n) {
    DissimilarityMatrix d;
    d.n = n;
    d.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d.labels.push_back({"m", i + 1});
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = coords[2 * i] - coords[2 * j];
            const double dy = coords[2 * i + 1] - coords[2 * j + 1];
            d.values[i * n + j] = std::sqrt(dx * dx + dy * dy);
        }
    }
    return d;
}

RankingEnsemble ensemble_of(const std::string& name, std::vector<RankingVector> runs) {
    std::vector<std::uint64_t> seeds(runs.size());
    std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
    return make_ensemble(name, std::move(runs), std::move(seeds));
}

}  // namespace

TEST_SUITE("mds") {

TEST_CASE("rank_dissimilarity turns agreement into 0 and reversal into 2") {
    RankingVector up{{1, 2, 3, 4}};
    RankingVector down{{4, 3, 2, 1}};
    DissimilarityMatrix d = rank_dissimilarity({ensemble_of("a", {up, up, down})});
    REQUIRE(d.n == 3);
    CHECK(d.at(0, 1) == 0.0);
    CHECK(d.at(0, 2) == 2.0);
    CHECK(d.at(1, 2) == 2.0);
    CHECK(d.at(2, 0) == d.at(0, 2));
    for (std::size_t i = 0; i < 3; ++i) CHECK(d.at(i, i) == 0.0);
}

TEST_CASE("six ensembles of seven runs label a 42 x 42 matrix") {
    Rng rng(7);
    std::vector<RankingEnsemble> es;
    const std::vector<std::string> names{"pearson", "relief", "svm_wrapper",
                                         "nn_wrapper", "svm_rfe", "random_forest"};
    for (const auto& name : names) {
        std::vector<RankingVector> runs;
        for (int r = 0; r < 7; ++r) runs.push_back(testutil::random_permutation(9, rng));
        es.push_back(ensemble_of(name, std::move(runs)));
    }
    DissimilarityMatrix d = rank_dissimilarity(es);
    REQUIRE(d.n == 42);
    REQUIRE(d.labels.size() == 42);
    for (std::size_t e = 0; e < 6; ++e) {
        for (std::size_t r = 0; r < 7; ++r) {
            CHECK(d.labels[e * 7 + r].first == names[e]);
            CHECK(d.labels[e * 7 + r].second == r + 1);
        }
    }
    CHECK_NOTHROW(validate_dissimilarity(d));
    // delta entries agree with 1 - spearman computed directly
    std::vector<const RankingVector*> flat;
    for (const auto& e : es)
        for (const auto& r : e.rankings) flat.push_back(&r);
    for (std::size_t i = 0; i < 42; i += 5)
        for (std::size_t j = i + 1; j < 42; j += 3)
            CHECK(d.at(i, j) == 1.0 - spearman(*flat[i], *flat[j]));
}

TEST_CASE("rank_dissimilarity rejects mixed feature counts and empty input") {
    RankingVector a{{1, 2, 3}};
    RankingVector b{{1, 2, 3, 4}};
    CHECK_THROWS_AS(rank_dissimilarity({ensemble_of("x", {a, a}), ensemble_of("y", {b, b})}),
                    DataError);
    CHECK_THROWS_AS(rank_dissimilarity({}), DataError);
}

TEST_CASE("validate_dissimilarity rejects malformed matrices") {
    DissimilarityMatrix ok = matrix_from(2, {0, 1, 1, 0});
    CHECK_NOTHROW(validate_dissimilarity(ok));

    DissimilarityMatrix shape = ok;
    shape.labels.pop_back();
    CHECK_THROWS_AS(validate_dissimilarity(shape), DataError);

    CHECK_THROWS_AS(validate_dissimilarity(matrix_from(2, {0.5, 1, 1, 0})), DataError);
    CHECK_THROWS_AS(validate_dissimilarity(matrix_from(2, {0, -1, -1, 0})), DataError);
    CHECK_THROWS_AS(
        validate_dissimilarity(matrix_from(2, {0, std::nan(""), std::nan(""), 0})),
        DataError);
    CHECK_THROWS_AS(validate_dissimilarity(matrix_from(2, {0, 1, 1.001, 0})), DataError);
}

TEST_CASE("an equilateral triangle embeds with near-zero stress") {
    DissimilarityMatrix d = matrix_from(3, {0, 1, 1, 1, 0, 1, 1, 1, 0});
    Embedding e = embed(d, 5);
    CHECK(e.stress < 1e-6);
    CHECK(e.labels.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            const double dx = e.x(i) - e.x(j);
            const double dy = e.y(i) - e.y(j);
            CHECK(std::abs(std::sqrt(dx * dx + dy * dy) - 1.0) <= 1e-6);
        }
    }
}

TEST_CASE("a 2D-realizable configuration is recovered up to rigid motion") {
    Rng rng(99);
    const std::size_t n = 8;
    std::vector<double> truth(2 * n);
    for (double& c : truth) c = 2.0 * rng.normal();
    DissimilarityMatrix d = distances_of(truth, n);
    Embedding e = embed(d, 3);
    CHECK(e.stress < 1e-6);
    CHECK(testutil::rigid_align_error(e.coordinates, truth, n) < 1e-6);
}

TEST_CASE("stress history never increases and matches the reported stress") {
    Rng rng(1234);
    const std::size_t n = 10;
    DissimilarityMatrix d;
    d.n = n;
    d.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d.labels.push_back({"m", i + 1});
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.1 + rng.uniform01();
            d.values[i * n + j] = v;
            d.values[j * n + i] = v;
        }
    }
    Embedding e = embed(d, 11);
    REQUIRE(e.stress_history.size() == e.iterations + 1);
    for (std::size_t t = 1; t < e.stress_history.size(); ++t)
        CHECK(e.stress_history[t] <= e.stress_history[t - 1] + 1e-9);
    CHECK(e.stress == e.stress_history.back());
    CHECK(std::abs(testutil::stress_of(e.coordinates, d) - e.stress) <= 1e-9);

    // classical init is non-degenerate here, so the seed changes nothing
    Embedding e2 = embed(d, 999);
    CHECK(e2.coordinates == e.coordinates);
    CHECK(e2.stress == e.stress);
}

TEST_CASE("identical rankings collapse to the origin with zero stress") {
    RankingVector r{{2, 1, 3}};
    DissimilarityMatrix d = rank_dissimilarity({ensemble_of("a", {r, r, r, r})});
    Embedding e = embed(d, 21);
    CHECK(e.converged);
    CHECK(e.stress == 0.0);
    REQUIRE(e.stress_history.size() == 1);
    CHECK(e.stress_history[0] == 0.0);
    for (double c : e.coordinates) CHECK(c == 0.0);
}

TEST_CASE("embedding needs at least three points") {
    CHECK_THROWS_AS(embed(matrix_from(2, {0, 1, 1, 0}), 1), DataError);
}

TEST_CASE("stress is invariant under rigid motions of the layout") {
    Rng rng(5);
    const std::size_t n = 6;
    std::vector<double> coords(2 * n);
    for (double& c : coords) c = rng.normal();
    DissimilarityMatrix d = matrix_from(n, std::vector<double>(n * n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.2 + rng.uniform01();
            d.values[i * n + j] = v;
            d.values[j * n + i] = v;
        }
    const double base = testutil::stress_of(coords, d);
    const double ct = std::cos(0.7), st = std::sin(0.7);
    std::vector<double> moved(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = coords[2 * i], y = coords[2 * i + 1];
        moved[2 * i] = ct * x - st * y + 3.25;       // rotate then translate
        moved[2 * i + 1] = -(st * x + ct * y) - 7.5; // and reflect in y
    }
    CHECK(std::abs(testutil::stress_of(moved, d) - base) <= 1e-12);
}

TEST_CASE("dispersion is the RMS distance to each ranker centroid") {
    Embedding e;
    e.labels = {{"a", 1}, {"a", 2}, {"b", 1}, {"b", 2}, {"b", 3}};
    e.coordinates = {0, 0, 2, 0, 1, 1, 1, 1, 1, 1};
    auto disp = dispersion(e);
    REQUIRE(disp.size() == 2);
    CHECK(disp.at("a") == 1.0);  // centroid (1,0), both points at distance 1
    CHECK(disp.at("b") == 0.0);
}

TEST_CASE("tight clusters disperse less than loose ones, everywhere") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        Embedding e;
        for (std::size_t i = 0; i < 6; ++i) {
            e.labels.push_back({"tight", i + 1});
            e.coordinates.push_back(1e-3 * rng.normal());
            e.coordinates.push_back(1e-3 * rng.normal());
        }
        for (std::size_t i = 0; i < 6; ++i) {
            e.labels.push_back({"loose", i + 1});
            e.coordinates.push_back(rng.normal());
            e.coordinates.push_back(rng.normal());
        }
        auto disp = dispersion(e);
        CHECK(disp.at("loose") > disp.at("tight"));

        Embedding shifted = e;
        for (std::size_t i = 0; i < shifted.labels.size(); ++i) {
            shifted.coordinates[2 * i] += 17.0;
            shifted.coordinates[2 * i + 1] -= 4.5;
        }
        auto disp2 = dispersion(shifted);
        CHECK(std::abs(disp2.at("loose") - disp.at("loose")) <= 1e-12);
        CHECK(std::abs(disp2.at("tight") - disp.at("tight")) <= 1e-12);
    }
}

TEST_CASE("single-point rankers are omitted with a warning") {
    Embedding e;
    e.labels = {{"solo", 1}, {"duo", 1}, {"duo", 2}};
    e.coordinates = {5, 5, 0, 0, 1, 0};
    WarningSink sink;
    auto disp = dispersion(e, &sink);
    CHECK(disp.size() == 1);
    CHECK(disp.count("duo") == 1);
    CHECK(disp.count("solo") == 0);
    REQUIRE(sink.messages().size() == 1);
    CHECK(sink.messages()[0].find("solo") != std::string::npos);
}

TEST_CASE("dispersion rejects an embedding whose labels are missing") {
    Embedding e;
    e.coordinates = {0, 0, 1, 1};
    CHECK_THROWS_AS(dispersion(e), DataError);
}

}  // TEST_SUITE
