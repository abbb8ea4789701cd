#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rankstab/classifiers.hpp"
#include "rankstab/ingest.hpp"
#include "test_util.hpp"

using namespace rankstab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "rankstab_ingest_tests";
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
    fs::path path = scratch_dir() / name;
    std::ofstream out(path);
    out << content;
    out.close();
    return path.string();
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("load_csv drops rows with missing tokens") {
    std::string path = write_file("missing.csv",
                                  "a,b,label\n"
                                  "1,2,1\n"
                                  "3,NA,0\n"
                                  "5,6,1\n"
                                  "7,8,0\n"
                                  "9,10,0\n");
    LoadResult r = load_csv(path, CsvSchema{});
    CHECK(r.dataset.rows() == 4);
    CHECK(r.dropped_rows == 1);
    CHECK(r.dataset.cols() == 2);
    CHECK(r.dataset.feature_names() == std::vector<std::string>{"a", "b"});
    CHECK(r.dataset.labels() == std::vector<int>{1, 1, 0, 0});
    CHECK(r.dataset.at(1, 1) == 6.0);
}

TEST_CASE("load_csv keeps every row when nothing is missing") {
    std::string path = write_file("clean.csv", "x,label\n1,1\n2,0\n3,1\n");
    LoadResult r = load_csv(path, CsvSchema{});
    CHECK(r.dataset.rows() == 3);
    CHECK(r.dropped_rows == 0);
}

TEST_CASE("load_csv rejects a third label token") {
    std::string path = write_file("threeway.csv", "x,label\n1,1\n2,0\n3,2\n");
    CHECK_THROWS_AS(load_csv(path, CsvSchema{}), DataError);
}

TEST_CASE("load_csv reports a missing label column as a schema error") {
    std::string path = write_file("nolabel.csv", "x,y\n1,2\n");
    CHECK_THROWS_AS(load_csv(path, CsvSchema{}), ConfigError);
}

TEST_CASE("load_csv names the cell it cannot parse") {
    std::string path = write_file("badcell.csv", "x,y,label\n1,2,1\n1,zzz,0\n");
    try {
        load_csv(path, CsvSchema{});
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("row 3") != std::string::npos);
        CHECK(msg.find("'y'") != std::string::npos);
        CHECK(msg.find("zzz") != std::string::npos);
    }
}

TEST_CASE("load_csv errors when deletion leaves nothing") {
    std::string path = write_file("allmissing.csv", "x,label\nNA,1\nNA,0\n");
    CHECK_THROWS_AS(load_csv(path, CsvSchema{}), DataError);
}

TEST_CASE("load_csv errors on an absent file and an empty file") {
    CHECK_THROWS_AS(load_csv((scratch_dir() / "nope.csv").string(), CsvSchema{}), DataError);
    std::string path = write_file("empty.csv", "");
    CHECK_THROWS_AS(load_csv(path, CsvSchema{}), DataError);
}

TEST_CASE("load_csv honours a custom schema") {
    CsvSchema schema;
    schema.label_column = "status";
    schema.positive_label = "case";
    schema.missing_tokens = {"?", ""};
    std::string path = write_file("custom.csv",
                                  "status,v\n"
                                  "case,1.5\n"
                                  "control,2.5\n"
                                  "case,?\n");
    LoadResult r = load_csv(path, schema);
    CHECK(r.dataset.rows() == 2);
    CHECK(r.dropped_rows == 1);
    CHECK(r.dataset.labels() == std::vector<int>{1, 0});
    // positive label must not double as a missing token
    schema.missing_tokens.insert("case");
    CHECK_THROWS_AS(load_csv(path, schema), ConfigError);
}

TEST_CASE("write_csv then load_csv round-trips the dataset") {
    SyntheticSpec spec;
    spec.n_instances = 40;
    spec.n_informative = 2;
    spec.n_noise = 2;
    spec.n_redundant = 1;
    spec.coefficients = {1.3, -0.7};
    spec.snp_fraction = 0.4;
    spec.seed = 99;
    Dataset d = generate_synthetic(spec).dataset;
    std::string path = (scratch_dir() / "roundtrip.csv").string();
    write_csv(d, path);
    LoadResult r = load_csv(path, CsvSchema{});
    REQUIRE(r.dataset.rows() == d.rows());
    REQUIRE(r.dataset.cols() == d.cols());
    CHECK(r.dataset.feature_names() == d.feature_names());
    CHECK(r.dataset.labels() == d.labels());
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j)
            CHECK(std::abs(r.dataset.at(i, j) - d.at(i, j)) <= 1e-12);
}

TEST_CASE("standardize matches the hand example and zeroes constants") {
    Dataset d = testutil::dataset_from({{1, 5}, {2, 5}, {3, 5}}, {1, 0, 1});
    auto [std_d, fit] = standardize(d);
    const double v = 1.0 / std::sqrt(2.0 / 3.0);
    CHECK(std::abs(std_d.at(0, 0) + v) <= 1e-12);
    CHECK(std::abs(std_d.at(1, 0)) <= 1e-12);
    CHECK(std::abs(std_d.at(2, 0) - v) <= 1e-12);
    CHECK(std_d.column(1) == std::vector<double>{0, 0, 0});
    CHECK(fit.means == std::vector<double>{2, 5});
    CHECK(fit.sds[1] == 0.0);
}

TEST_CASE("standardizing already-standardized data changes nothing") {
    Rng rng(4);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 24; ++i) {
        rows.push_back({rng.normal(), rng.normal(), rng.normal()});
        labels.push_back(i % 2);
    }
    Dataset d = testutil::dataset_from(rows, labels);
    auto [once, fit1] = standardize(d);
    auto [twice, fit2] = standardize(once);
    for (std::size_t i = 0; i < once.rows(); ++i)
        for (std::size_t j = 0; j < once.cols(); ++j)
            CHECK(std::abs(once.at(i, j) - twice.at(i, j)) <= 1e-12);
    // re-applying the fitted parameters to the raw data is the identity too
    Dataset again = fit1.transform(d);
    for (std::size_t i = 0; i < once.rows(); ++i)
        for (std::size_t j = 0; j < once.cols(); ++j)
            CHECK(again.at(i, j) == once.at(i, j));
}

TEST_CASE("standardizer transforms held-out rows with training statistics") {
    Dataset train = testutil::dataset_from({{0}, {10}}, {1, 0});
    Standardizer fit = Standardizer::fit(train.matrix());
    double row[1] = {5.0};
    fit.transform_row(row, 1);
    CHECK(row[0] == 0.0);
    row[0] = 10.0;
    fit.transform_row(row, 1);
    CHECK(row[0] == 1.0);
    CHECK_THROWS_AS(fit.transform(testutil::dataset_from({{1, 2}, {3, 4}}, {1, 0})), DataError);
}

TEST_CASE("subsample keeps floor(fraction * M) rows and both classes") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 3295; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i % 3 == 0 ? 1 : 0);
    }
    Dataset d = testutil::dataset_from(rows, labels);
    Dataset s = subsample(d, 0.7, 1234);
    CHECK(s.rows() == 2306);
    CHECK(s.positives() > 0);
    CHECK(s.negatives() > 0);
}

TEST_CASE("subsample at fraction 1 is a permutation of the input") {
    Rng rng(8);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) {
        rows.push_back({rng.uniform01(), rng.uniform01()});
        labels.push_back(i % 2);
    }
    Dataset d = testutil::dataset_from(rows, labels);
    Dataset s = subsample(d, 1.0, 77);
    REQUIRE(s.rows() == d.rows());
    auto key = [](const Dataset& x) {
        std::vector<std::vector<double>> ks;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            std::vector<double> row;
            for (std::size_t j = 0; j < x.cols(); ++j) row.push_back(x.at(i, j));
            row.push_back(static_cast<double>(x.labels()[i]));
            ks.push_back(std::move(row));
        }
        std::sort(ks.begin(), ks.end());
        return ks;
    };
    CHECK(key(s) == key(d));
}

TEST_CASE("subsample is deterministic per seed and a sub-multiset of the rows") {
    Rng rng(21);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) {
        rows.push_back({rng.uniform01()});
        labels.push_back(i % 2);
    }
    Dataset d = testutil::dataset_from(rows, labels);
    Dataset a = subsample(d, 0.6, 5);
    Dataset b = subsample(d, 0.6, 5);
    CHECK(a.features() == b.features());
    CHECK(a.labels() == b.labels());
    // every sampled row exists in the input (values here are unique)
    for (std::size_t i = 0; i < a.rows(); ++i) {
        bool found = false;
        for (std::size_t i2 = 0; i2 < d.rows(); ++i2)
            if (d.at(i2, 0) == a.at(i, 0) && d.labels()[i2] == a.labels()[i]) found = true;
        CHECK(found);
    }
    Dataset c = subsample(d, 0.6, 6);
    CHECK(c.features() != a.features());
}

TEST_CASE("subsample rejects degenerate requests") {
    Dataset d = testutil::dataset_from({{1}, {2}, {3}, {4}}, {1, 0, 0, 0});
    CHECK_THROWS_AS(subsample(d, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(subsample(d, 1.5, 1), ConfigError);
    // floor(0.3 * 4) = 1 row can never hold both classes
    CHECK_THROWS_AS(subsample(d, 0.3, 1), DataError);
}

TEST_CASE("synthetic spec validation") {
    SyntheticSpec spec;
    spec.n_instances = 100;
    spec.n_informative = 2;
    spec.n_noise = 3;
    spec.coefficients = {1.0, 2.0};
    CHECK_NOTHROW(validate_synthetic_spec(spec));

    SyntheticSpec bad = spec;
    bad.coefficients = {1.0};
    CHECK_THROWS_AS(validate_synthetic_spec(bad), ConfigError);
    bad = spec;
    bad.n_instances = 1;
    CHECK_THROWS_AS(validate_synthetic_spec(bad), ConfigError);
    bad = spec;
    bad.n_informative = 0;
    bad.coefficients.clear();
    bad.n_redundant = 2;
    CHECK_THROWS_AS(validate_synthetic_spec(bad), ConfigError);
    bad = spec;
    bad.prevalence = 0.0;
    CHECK_THROWS_AS(validate_synthetic_spec(bad), ConfigError);
    bad = spec;
    bad.snp_fraction = 1.5;
    CHECK_THROWS_AS(validate_synthetic_spec(bad), ConfigError);
}

TEST_CASE("null synthetic model hits the target prevalence") {
    SyntheticSpec spec;
    spec.n_instances = 2000;
    spec.n_informative = 2;
    spec.n_noise = 3;
    spec.coefficients = {0.0, 0.0};
    spec.seed = 31;
    SyntheticResult r = generate_synthetic(spec);
    const double rate = static_cast<double>(r.dataset.positives()) / 2000.0;
    CHECK(std::abs(rate / spec.prevalence - 1.0) <= 0.05 + 1e-9);
    CHECK(r.informative_indices.size() == 2);
}

TEST_CASE("a huge planted coefficient gives a near-perfect single feature") {
    SyntheticSpec spec;
    spec.n_instances = 1000;
    spec.n_informative = 1;
    spec.n_noise = 2;
    spec.coefficients = {10.0};
    spec.seed = 7;
    SyntheticResult r = generate_synthetic(spec);
    REQUIRE(r.informative_indices.size() == 1);
    TopKMask only = mask_from_indices(r.dataset.cols(), {r.informative_indices[0]});
    Dataset single = r.dataset.select_features(only);
    ClassifierSpec lr;
    lr.kind = ClassifierKind::LR;
    TrainedModel m = train(lr, single, 1);
    CHECK(auc(m.score(single), single.labels()) > 0.95);
}

TEST_CASE("synthetic generation is deterministic per seed") {
    SyntheticSpec spec;
    spec.n_instances = 120;
    spec.n_informative = 3;
    spec.n_noise = 4;
    spec.n_redundant = 2;
    spec.coefficients = {1.0, -1.5, 0.5};
    spec.snp_fraction = 0.5;
    spec.seed = 17;
    SyntheticResult a = generate_synthetic(spec);
    SyntheticResult b = generate_synthetic(spec);
    CHECK(a.dataset.features() == b.dataset.features());
    CHECK(a.dataset.labels() == b.dataset.labels());
    CHECK(a.informative_indices == b.informative_indices);
    spec.seed = 18;
    SyntheticResult c = generate_synthetic(spec);
    CHECK(c.dataset.features() != a.dataset.features());
}

TEST_CASE("snp columns are coded as 0/1/2 genotypes") {
    SyntheticSpec spec;
    spec.n_instances = 200;
    spec.n_informative = 2;
    spec.n_noise = 2;
    spec.coefficients = {1.0, 1.0};
    spec.snp_fraction = 1.0;
    spec.seed = 3;
    Dataset d = generate_synthetic(spec).dataset;
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) {
            const double v = d.at(i, j);
            CHECK((v == 0.0 || v == 1.0 || v == 2.0));
        }
}

TEST_CASE("redundant features track their informative source") {
    SyntheticSpec spec;
    spec.n_instances = 400;
    spec.n_informative = 1;
    spec.n_noise = 1;
    spec.n_redundant = 1;
    spec.coefficients = {1.0};
    spec.seed = 12;
    SyntheticResult r = generate_synthetic(spec);
    // the redundant column is a noisy copy of an informative one, so the two
    // should correlate strongly; identify columns by the ground-truth list
    const std::size_t info = r.informative_indices[0];
    double best = 0.0;
    for (std::size_t j = 0; j < r.dataset.cols(); ++j) {
        if (j == info) continue;
        std::vector<double> a = r.dataset.column(info);
        std::vector<double> b = r.dataset.column(j);
        double ma = 0, mb = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            ma += a[i];
            mb += b[i];
        }
        ma /= a.size();
        mb /= b.size();
        double num = 0, da = 0, db = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            num += (a[i] - ma) * (b[i] - mb);
            da += (a[i] - ma) * (a[i] - ma);
            db += (b[i] - mb) * (b[i] - mb);
        }
        best = std::max(best, std::abs(num / std::sqrt(da * db)));
    }
    CHECK(best > 0.5);
}

}  // TEST_SUITE
