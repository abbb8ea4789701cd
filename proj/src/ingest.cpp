#include "rankstab/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace rankstab {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

bool parse_double(const std::string& token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

LoadResult load_csv(const std::string& path, const CsvSchema& schema) {
    if (schema.missing_tokens.count(schema.positive_label))
        throw ConfigError("positive label collides with a missing-value token");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    std::vector<std::string> header = split_csv_line(strip_cr(line));

    std::size_t label_col = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == schema.label_column) label_col = j;
    if (label_col == header.size())
        throw ConfigError("label column '" + schema.label_column + "' not found in header");

    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != label_col) names.push_back(header[j]);

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t dropped = 0;
    std::string negative_token;
    bool negative_seen = false;

    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        line = strip_cr(line);
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            std::ostringstream msg;
            msg << "row " << row_number << ": expected " << header.size() << " fields, got "
                << fields.size();
            throw DataError(msg.str());
        }
        bool missing = false;
        for (const auto& f : fields)
            if (schema.missing_tokens.count(f)) missing = true;
        if (missing) {
            ++dropped;
            continue;
        }
        const std::string& label_token = fields[label_col];
        if (label_token == schema.positive_label) {
            labels.push_back(1);
        } else {
            if (!negative_seen) {
                negative_token = label_token;
                negative_seen = true;
            } else if (label_token != negative_token) {
                throw DataError("row " + std::to_string(row_number) +
                                ": third label token '" + label_token +
                                "' (labels must be binary)");
            }
            labels.push_back(0);
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (j == label_col) continue;
            double v;
            if (!parse_double(fields[j], v)) {
                std::ostringstream msg;
                msg << "row " << row_number << ", column '" << header[j]
                    << "': cannot parse '" << fields[j] << "' as a finite number";
                throw DataError(msg.str());
            }
            values.push_back(v);
        }
    }
    if (labels.empty()) throw DataError("no rows left after listwise deletion: " + path);
    return LoadResult{Dataset(std::move(names), std::move(values), std::move(labels)), dropped};
}

void write_csv(const Dataset& d, const std::string& path, const std::string& label_column) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (const auto& name : d.feature_names()) out << name << ',';
    out << label_column << '\n';
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) out << format_double(d.at(i, j)) << ',';
        out << d.labels()[i] << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

// --- standardization --------------------------------------------------------

Standardizer Standardizer::fit(MatrixView x) {
    Standardizer s;
    s.means.assign(x.cols, 0.0);
    s.sds.assign(x.cols, 0.0);
    if (x.rows == 0) return s;
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) s.means[j] += x(i, j);
    for (std::size_t j = 0; j < x.cols; ++j) s.means[j] /= static_cast<double>(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) {
            double c = x(i, j) - s.means[j];
            s.sds[j] += c * c;
        }
    for (std::size_t j = 0; j < x.cols; ++j)
        s.sds[j] = std::sqrt(s.sds[j] / static_cast<double>(x.rows));
    return s;
}

void Standardizer::transform_row(double* row, std::size_t cols) const {
    for (std::size_t j = 0; j < cols; ++j)
        row[j] = sds[j] > 0.0 ? (row[j] - means[j]) / sds[j] : 0.0;
}

std::vector<double> Standardizer::transform_matrix(MatrixView x) const {
    std::vector<double> out(x.data, x.data + x.rows * x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) transform_row(out.data() + i * x.cols, x.cols);
    return out;
}

Dataset Standardizer::transform(const Dataset& d) const {
    if (d.cols() != means.size()) throw DataError("standardizer feature count mismatch");
    return Dataset(d.feature_names(), transform_matrix(d.matrix()), d.labels());
}

std::pair<Dataset, Standardizer> standardize(const Dataset& d) {
    Standardizer s = Standardizer::fit(d.matrix());
    return {s.transform(d), std::move(s)};
}

// --- subsampling ------------------------------------------------------------

Dataset subsample(const Dataset& d, double fraction, std::uint64_t seed,
                  std::size_t max_retries) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("subsample fraction must lie in (0, 1]");
    const std::size_t n = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(d.rows())));
    if (n < 2) throw DataError("subsample would keep fewer than 2 rows");
    Rng rng(seed);
    for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
        std::vector<std::size_t> idx = rng.sample_without_replacement(d.rows(), n);
        std::size_t pos = 0;
        for (std::size_t i : idx) pos += static_cast<std::size_t>(d.labels()[i]);
        if (pos > 0 && pos < n) return d.select_rows(idx);
    }
    throw DataError("subsample could not obtain both classes within the retry budget");
}

// --- synthetic generation ---------------------------------------------------

void validate_synthetic_spec(const SyntheticSpec& spec) {
    if (spec.n_instances < 2) throw ConfigError("synthetic spec: need at least 2 instances");
    const std::size_t p = spec.n_informative + spec.n_noise + spec.n_redundant;
    if (p == 0) throw ConfigError("synthetic spec: zero features");
    if (spec.coefficients.size() != spec.n_informative)
        throw ConfigError("synthetic spec: coefficient count must equal n_informative");
    if (spec.n_redundant > 0 && spec.n_informative == 0)
        throw ConfigError("synthetic spec: redundant features require informative ones");
    if (!(spec.snp_fraction >= 0.0 && spec.snp_fraction <= 1.0))
        throw ConfigError("synthetic spec: snp_fraction must lie in [0, 1]");
    if (!(spec.prevalence > 0.0 && spec.prevalence < 1.0))
        throw ConfigError("synthetic spec: prevalence must lie in (0, 1)");
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// intercept for which the mean of sigmoid(z + b) equals the target rate
double calibrate_intercept(const std::vector<double>& z, double target) {
    double lo = -50.0, hi = 50.0;
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        double mean = 0.0;
        for (double v : z) mean += sigmoid(v + mid);
        mean /= static_cast<double>(z.size());
        if (mean < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SyntheticResult generate_synthetic(const SyntheticSpec& spec) {
    validate_synthetic_spec(spec);
    const std::size_t p = spec.n_informative + spec.n_noise + spec.n_redundant;
    const std::size_t m = spec.n_instances;
    Rng rng(derive_seed(spec.seed, "synthetic", 0));

    // column layout: informative, then redundant, then noise, shuffled
    std::vector<std::size_t> position(p);
    std::iota(position.begin(), position.end(), std::size_t{0});
    rng.shuffle(position);

    // which columns carry genotype coding
    const std::size_t n_snp = static_cast<std::size_t>(std::llround(spec.snp_fraction * static_cast<double>(p)));
    std::vector<std::size_t> snp_cols = rng.sample_without_replacement(p, n_snp);
    std::vector<bool> is_snp(p, false);
    for (std::size_t c : snp_cols) is_snp[c] = true;

    std::vector<double> maf(p, 0.0);
    for (std::size_t c = 0; c < p; ++c)
        if (is_snp[c]) maf[c] = 0.1 + 0.4 * rng.uniform01();

    // base columns (informative and noise); redundant columns copy informative
    std::vector<double> features(m * p, 0.0);
    auto draw_column = [&](std::size_t col) {
        for (std::size_t i = 0; i < m; ++i)
            features[i * p + col] = is_snp[col] ? static_cast<double>(rng.binomial2(maf[col]))
                                                : rng.normal();
    };
    std::vector<std::size_t> informative_cols(spec.n_informative);
    for (std::size_t j = 0; j < spec.n_informative; ++j) {
        informative_cols[j] = position[j];
        draw_column(position[j]);
    }
    for (std::size_t j = 0; j < spec.n_redundant; ++j) {
        std::size_t col = position[spec.n_informative + j];
        std::size_t src = informative_cols[j % spec.n_informative];
        for (std::size_t i = 0; i < m; ++i)
            features[i * p + col] = features[i * p + src] + 0.3 * rng.normal();
    }
    for (std::size_t j = 0; j < spec.n_noise; ++j)
        draw_column(position[spec.n_informative + spec.n_redundant + j]);

    std::vector<double> z(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < spec.n_informative; ++j)
            z[i] += spec.coefficients[j] * features[i * p + informative_cols[j]];
    const double intercept = calibrate_intercept(z, spec.prevalence);

    // draw labels, redrawing until the empirical case rate lands within
    // +-5% (relative) of the target prevalence
    const double tol = 0.05 * spec.prevalence;
    std::vector<int> labels(m, 0);
    bool ok = false;
    for (std::size_t attempt = 0; attempt < 64 && !ok; ++attempt) {
        std::size_t cases = 0;
        for (std::size_t i = 0; i < m; ++i) {
            labels[i] = rng.bernoulli(sigmoid(z[i] + intercept)) ? 1 : 0;
            cases += static_cast<std::size_t>(labels[i]);
        }
        double rate = static_cast<double>(cases) / static_cast<double>(m);
        ok = cases > 0 && cases < m && std::abs(rate - spec.prevalence) <= tol;
    }
    if (!ok) throw NumericError("synthetic generation: prevalence calibration failed");

    std::vector<std::string> names(p);
    for (std::size_t c = 0; c < p; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "x%03zu", c + 1);
        names[c] = buf;
    }
    std::vector<std::size_t> truth = informative_cols;
    std::sort(truth.begin(), truth.end());
    return SyntheticResult{Dataset(std::move(names), std::move(features), std::move(labels)),
                           std::move(truth)};
}

}  // namespace rankstab
