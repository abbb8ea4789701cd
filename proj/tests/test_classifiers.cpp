#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rankstab/classifiers.hpp"
#include "rankstab/ingest.hpp"
#include "rankstab/linear.hpp"
#include "rankstab/nn.hpp"
#include "rankstab/tree.hpp"
#include "test_util.hpp"

using namespace rankstab;

namespace {

ClassifierSpec make_spec(ClassifierKind kind, std::map<std::string, double> hp = {}) {
    ClassifierSpec spec;
    spec.kind = kind;
    spec.hyperparameters = std::move(hp);
    return spec;
}

// two shifted gaussian blobs, linearly separable when gap is large
Dataset blobs(std::size_t n, double gap, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = i % 2 == 0 ? 1 : 0;
        const double c = y == 1 ? gap : -gap;
        rows.push_back({c + 0.3 * rng.normal(), c + 0.3 * rng.normal()});
        labels.push_back(y);
    }
    return testutil::dataset_from(rows, labels);
}

Dataset xor_cloud(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        double a = rng.uniform01() * 2.0 - 1.0;
        double b = rng.uniform01() * 2.0 - 1.0;
        if (std::abs(a) < 0.05) a = a < 0 ? -0.05 : 0.05;
        if (std::abs(b) < 0.05) b = b < 0 ? -0.05 : 0.05;
        rows.push_back({a, b});
        labels.push_back((a > 0) != (b > 0) ? 1 : 0);
    }
    return testutil::dataset_from(rows, labels);
}

Dataset random_labels(std::size_t n, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        for (std::size_t j = 0; j < p; ++j) row.push_back(rng.normal());
        rows.push_back(std::move(row));
        labels.push_back(i % 2);
    }
    return testutil::dataset_from(rows, labels);
}

}  // namespace

TEST_SUITE("classifiers") {

TEST_CASE("hyperparameter validation rejects unknown names and bad ranges") {
    CHECK_THROWS_AS(validate_classifier_spec(make_spec(ClassifierKind::LR, {{"alpha", 1}})),
                    ConfigError);
    CHECK_THROWS_AS(validate_classifier_spec(make_spec(ClassifierKind::KNN, {{"k", 0}})),
                    ConfigError);
    CHECK_THROWS_AS(validate_classifier_spec(make_spec(ClassifierKind::KNN, {{"k", 2.5}})),
                    ConfigError);
    CHECK_THROWS_AS(validate_classifier_spec(make_spec(ClassifierKind::BT, {{"learn_rate", 0}})),
                    ConfigError);
    CHECK_THROWS_AS(validate_classifier_spec(make_spec(ClassifierKind::NN, {{"hidden", 0}})),
                    ConfigError);
    CHECK_NOTHROW(validate_classifier_spec(make_spec(ClassifierKind::SVM, {{"C", 2.0}})));
    CHECK(to_string(ClassifierKind::BT) == "BT");
    CHECK(classifier_kind_from_string("KNN") == ClassifierKind::KNN);
    CHECK_THROWS_AS(classifier_kind_from_string("GBM"), ConfigError);
}

TEST_CASE("LR separates a linearly separable toy set") {
    Dataset d = blobs(40, 2.0, 10);
    TrainedModel m = train(make_spec(ClassifierKind::LR), d, 1);
    std::vector<double> scores = m.score(d);
    CHECK(auc(scores, d.labels()) == 1.0);
    double worst_case = 1e300, best_control = -1e300;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        if (d.labels()[i] == 1) {
            worst_case = std::min(worst_case, scores[i]);
        } else {
            best_control = std::max(best_control, scores[i]);
        }
    }
    CHECK(worst_case > best_control);
}

TEST_CASE("LR cannot learn xor but the sigmoid net can") {
    Dataset d = xor_cloud(2000, 31);
    TrainedModel lr = train(make_spec(ClassifierKind::LR), d, 1);
    const double lr_auc = auc(lr.score(d), d.labels());
    CHECK(lr_auc > 0.4);
    CHECK(lr_auc < 0.6);

    TrainedModel nn = train(make_spec(ClassifierKind::NN,
                                      {{"epochs", 3000}, {"patience", 3000}, {"hidden", 4}}),
                            d, 5);
    CHECK(auc(nn.score(d), d.labels()) > 0.9);
}

TEST_CASE("score handles empty input and rejects wrong widths") {
    Dataset d = blobs(20, 2.0, 3);
    TrainedModel m = train(make_spec(ClassifierKind::LR), d, 1);
    CHECK(m.score(MatrixView{nullptr, 0, 2}).empty());
    const double one_wide[2] = {1.0, 2.0};
    CHECK_THROWS_AS(m.score(MatrixView{one_wide, 2, 1}), DataError);
}

TEST_CASE("KNN with k=1 scores a training point as its own label") {
    Dataset d = testutil::dataset_from(
        {{0, 1}, {1, 0}, {2, 5}, {5, 2}, {3, 3.5}, {4, 1}}, {1, 0, 1, 0, 1, 0});
    TrainedModel m = train(make_spec(ClassifierKind::KNN, {{"k", 1}}), d, 1);
    std::vector<double> scores = m.score(d);
    for (std::size_t i = 0; i < d.rows(); ++i)
        CHECK(scores[i] == static_cast<double>(d.labels()[i]));
}

TEST_CASE("KNN clamps an oversized k with a warning") {
    Dataset d = blobs(10, 2.0, 6);
    WarningSink sink;
    TrainedModel m = train(make_spec(ClassifierKind::KNN), d, 1, &sink);  // default k=47
    CHECK_FALSE(sink.empty());
    CHECK(m.score(d).size() == d.rows());
}

TEST_CASE("duplicating every training row leaves LR and KNN scores unchanged") {
    Dataset d = blobs(30, 1.0, 17);
    std::vector<double> doubled_x = d.features();
    doubled_x.insert(doubled_x.end(), d.features().begin(), d.features().end());
    std::vector<int> doubled_y = d.labels();
    doubled_y.insert(doubled_y.end(), d.labels().begin(), d.labels().end());
    Dataset dd(d.feature_names(), doubled_x, doubled_y);

    Dataset probe = blobs(16, 1.0, 18);

    TrainedModel lr1 = train(make_spec(ClassifierKind::LR), d, 1);
    TrainedModel lr2 = train(make_spec(ClassifierKind::LR), dd, 1);
    std::vector<double> a = lr1.score(probe);
    std::vector<double> b = lr2.score(probe);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);

    // with every row doubled the k nearest of the copy-set are the same
    // points twice, so k'=2k reproduces the vote fractions
    TrainedModel knn1 = train(make_spec(ClassifierKind::KNN, {{"k", 5}}), d, 1);
    TrainedModel knn2 = train(make_spec(ClassifierKind::KNN, {{"k", 10}}), dd, 1);
    a = knn1.score(probe);
    b = knn2.score(probe);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
}

TEST_CASE("LR analytic gradient matches central finite differences") {
    Dataset d = random_labels(40, 3, 23);
    Rng rng(8);
    for (int point = 0; point < 10; ++point) {
        std::vector<double> w(4);
        for (double& v : w) v = rng.normal();
        std::vector<double> g = logistic_grad(w, d.matrix(), d.labels(), 0.1);
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(w[j]));
            std::vector<double> lo = w, hi = w;
            lo[j] -= h;
            hi[j] += h;
            const double fd = (logistic_nll(hi, d.matrix(), d.labels(), 0.1) -
                               logistic_nll(lo, d.matrix(), d.labels(), 0.1)) /
                              (2.0 * h);
            const double denom = std::max(1e-8, std::abs(fd));
            CHECK(std::abs(g[j] - fd) / denom <= 1e-4);
        }
    }
}

TEST_CASE("NN analytic gradient matches central finite differences") {
    Dataset d = random_labels(25, 3, 29);
    const std::size_t hidden = 3;
    Rng rng(13);
    for (int point = 0; point < 10; ++point) {
        std::vector<double> w(mlp_param_count(hidden, 3));
        for (double& v : w) v = rng.normal();
        std::vector<double> g = mlp_grad(w, hidden, d.matrix(), d.labels());
        for (std::size_t j = 0; j < w.size(); j += 3) {  // every third weight keeps it quick
            const double h = 1e-6 * std::max(1.0, std::abs(w[j]));
            std::vector<double> lo = w, hi = w;
            lo[j] -= h;
            hi[j] += h;
            const double fd = (mlp_loss(hi, hidden, d.matrix(), d.labels()) -
                               mlp_loss(lo, hidden, d.matrix(), d.labels())) /
                              (2.0 * h);
            const double denom = std::max(1e-8, std::abs(fd));
            CHECK(std::abs(g[j] - fd) / denom <= 1e-4);
        }
    }
}

TEST_CASE("BT training loss history is non-increasing") {
    Dataset d = blobs(60, 0.8, 41);
    BoostedTrees bt = BoostedTrees::fit(d.matrix(), d.labels(), 80, 0.1, 20);
    REQUIRE(bt.loss_history.size() == 80);
    for (std::size_t t = 1; t < bt.loss_history.size(); ++t)
        CHECK(bt.loss_history[t] <= bt.loss_history[t - 1] + 1e-12);
}

TEST_CASE("LR flags non-convergence instead of failing") {
    Dataset d = blobs(40, 0.5, 51);
    WarningSink sink;
    TrainedModel m = train(make_spec(ClassifierKind::LR, {{"max_iter", 1}}), d, 1, &sink);
    CHECK_FALSE(m.converged());
    CHECK_FALSE(sink.empty());
    CHECK(m.score(d).size() == d.rows());
}

TEST_CASE("leave-one-out LR on a separable set is perfect") {
    Dataset d = blobs(10, 2.5, 61);
    EvalResult r = cross_validate(make_spec(ClassifierKind::LR), d, 10, 7);
    CHECK(r.auc == 1.0);
}

TEST_CASE("cross_validate is deterministic per seed for every kind") {
    Dataset d = blobs(36, 0.7, 71);
    for (ClassifierKind kind : {ClassifierKind::LR, ClassifierKind::KNN, ClassifierKind::SVM,
                                ClassifierKind::BT, ClassifierKind::NN}) {
        ClassifierSpec spec = make_spec(kind);
        if (kind == ClassifierKind::BT) spec.hyperparameters["rounds"] = 20;
        if (kind == ClassifierKind::NN) spec.hyperparameters["epochs"] = 40;
        EvalResult a = cross_validate(spec, d, 3, 99);
        EvalResult b = cross_validate(spec, d, 3, 99);
        CHECK(a.auc == b.auc);
        CHECK(a.accuracy == b.accuracy);
        CHECK(a.fold_aucs == b.fold_aucs);
        EvalResult c = cross_validate(spec, d, 3, 100);
        CHECK(a.seed != c.seed);
    }
}

TEST_CASE("aggregate auc is the mean of the fold aucs") {
    Dataset d = blobs(40, 0.6, 81);
    EvalResult r = cross_validate(make_spec(ClassifierKind::LR), d, 4, 3);
    REQUIRE(r.fold_aucs.size() == 4);
    double mean = 0.0;
    for (double f : r.fold_aucs) mean += f;
    mean /= 4.0;
    CHECK(std::abs(r.auc - mean) <= 1e-15);
}

TEST_CASE("stratification fails loudly when a class is too small") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 12; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i == 0 ? 1 : 0);
    }
    Dataset d = testutil::dataset_from(rows, labels);
    CHECK_THROWS_AS(cross_validate(make_spec(ClassifierKind::LR), d, 3, 1), DataError);
    CHECK_THROWS_AS(stratified_folds(labels, 1, 0), ConfigError);
    CHECK_THROWS_AS(stratified_folds(labels, 13, 0), ConfigError);
}

TEST_CASE("stratified folds balance both classes") {
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) labels.push_back(i < 20 ? 1 : 0);
    std::vector<std::size_t> folds = stratified_folds(labels, 5, 42);
    for (std::size_t f = 0; f < 5; ++f) {
        int pos = 0, neg = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (folds[i] != f) continue;
            (labels[i] == 1 ? pos : neg) += 1;
        }
        CHECK(pos == 4);
        CHECK(neg == 6);
    }
}

TEST_CASE("evaluate_subset with the full mask equals cross_validate") {
    Dataset d = blobs(30, 0.8, 91);
    TopKMask all = mask_from_indices(2, {0, 1});
    EvalResult a = evaluate_subset(make_spec(ClassifierKind::LR), d, all, 3, 17);
    EvalResult b = cross_validate(make_spec(ClassifierKind::LR), d, 3, 17);
    CHECK(a.auc == b.auc);
    CHECK(a.fold_aucs == b.fold_aucs);
}

TEST_CASE("evaluate_subset isolates strong and useless features") {
    SyntheticSpec spec;
    spec.n_instances = 600;
    spec.n_informative = 1;
    spec.n_noise = 4;
    spec.coefficients = {8.0};
    spec.seed = 5;
    SyntheticResult r = generate_synthetic(spec);
    const std::size_t strong = r.informative_indices[0];
    std::vector<std::size_t> noise;
    for (std::size_t j = 0; j < r.dataset.cols(); ++j)
        if (j != strong) noise.push_back(j);

    ClassifierSpec lr = make_spec(ClassifierKind::LR);
    EvalResult good =
        evaluate_subset(lr, r.dataset, mask_from_indices(5, {strong}), 5, 11);
    CHECK(good.auc > 0.9);
    EvalResult bad = evaluate_subset(lr, r.dataset, mask_from_indices(5, noise), 5, 11);
    CHECK(bad.auc < 0.62);
    CHECK(bad.auc > 0.38);
    CHECK_THROWS_AS(
        evaluate_subset(lr, r.dataset, TopKMask{std::vector<std::uint8_t>(5, 0), 0}, 5, 11),
        ConfigError);
}

TEST_CASE("permuted labels score near chance for LR and KNN") {
    Dataset d = random_labels(200, 5, 123);
    EvalResult lr = cross_validate(make_spec(ClassifierKind::LR), d, 5, 9);
    CHECK(lr.auc > 0.38);
    CHECK(lr.auc < 0.62);
    EvalResult knn = cross_validate(make_spec(ClassifierKind::KNN), d, 5, 9);
    CHECK(knn.auc > 0.38);
    CHECK(knn.auc < 0.62);
}

TEST_CASE("NN evaluation reports one value per repetition") {
    Dataset d = blobs(60, 1.5, 131);
    EvalResult r = cross_validate(make_spec(ClassifierKind::NN, {{"reps", 3}, {"epochs", 30}}),
                                  d, 5, 21);
    CHECK(r.fold_aucs.size() == 3);  // reps, not folds
    double mean = 0.0;
    for (double f : r.fold_aucs) mean += f;
    CHECK(std::abs(r.auc - mean / 3.0) <= 1e-15);
}

}  // TEST_SUITE
