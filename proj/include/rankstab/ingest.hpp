#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rankstab/types.hpp"

namespace rankstab {

// How to read a case-control CSV: which column is the label, which tokens
// mean "missing", and which label token maps to class 1.
struct CsvSchema {
    std::string label_column = "label";
    std::set<std::string> missing_tokens = {"", "NA"};
    std::string positive_label = "1";
};

struct LoadResult {
    Dataset dataset;
    std::size_t dropped_rows = 0;  // listwise deletions
};

// Loads a comma-delimited UTF-8 file with a header row. Rows containing a
// missing token in any column are dropped before parsing.
LoadResult load_csv(const std::string& path, const CsvSchema& schema);

void write_csv(const Dataset& d, const std::string& path, const std::string& label_column = "label");

// Fitted per-feature location/scale. sds[j] == 0 marks a constant column,
// which transforms to all zeros.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> sds;  // population sd

    static Standardizer fit(MatrixView x);
    void transform_row(double* row, std::size_t cols) const;
    std::vector<double> transform_matrix(MatrixView x) const;
    Dataset transform(const Dataset& d) const;
};

std::pair<Dataset, Standardizer> standardize(const Dataset& d);

// Uniform sampling without replacement of floor(fraction * M) rows,
// re-drawn up to a retry budget until both classes are present.
Dataset subsample(const Dataset& d, double fraction, std::uint64_t seed,
                  std::size_t max_retries = 100);

// Synthetic case-control generator: labels follow a logistic model over the
// informative block, redundant features are noisy copies of informative
// ones, and a fraction of columns are coded as 0/1/2 genotypes.
struct SyntheticSpec {
    std::size_t n_instances = 0;
    std::size_t n_informative = 0;
    std::size_t n_noise = 0;
    std::size_t n_redundant = 0;
    std::vector<double> coefficients;  // one per informative feature
    double snp_fraction = 0.0;
    double prevalence = 1.0 / 3.0;
    std::uint64_t seed = 0;
};

void validate_synthetic_spec(const SyntheticSpec& spec);

struct SyntheticResult {
    Dataset dataset;
    std::vector<std::size_t> informative_indices;  // ground truth, ascending
};

SyntheticResult generate_synthetic(const SyntheticSpec& spec);

}  // namespace rankstab
