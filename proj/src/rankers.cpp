#include "rankstab/rankers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankstab/forest.hpp"
#include "rankstab/ingest.hpp"
#include "rankstab/svm.hpp"

namespace rankstab {

namespace {

RankingVector ranking_from_scores(const std::vector<double>& score) {
    // descending score, ascending index on ties
    std::vector<std::size_t> order(score.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    RankingVector r;
    r.ranks.resize(score.size());
    for (std::size_t t = 0; t < order.size(); ++t) {
        r.ranks[order[t]] = static_cast<double>(t + 1);
    }
    return r;
}

double abs_label_correlation(const Dataset& d, std::size_t j) {
    std::size_t m = d.rows();
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mean_x += d.at(i, j);
        mean_y += d.labels()[i];
    }
    mean_x /= static_cast<double>(m);
    mean_y /= static_cast<double>(m);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double dx = d.at(i, j) - mean_x;
        double dy = d.labels()[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        return 0.0;
    }
    return std::abs(sxy / std::sqrt(sxx * syy));
}

Dataset subset_dataset(const Dataset& d, const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& cols) {
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (std::size_t j : cols) {
        names.push_back(d.feature_names()[j]);
    }
    std::vector<double> features;
    features.reserve(rows.size() * cols.size());
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t i : rows) {
        for (std::size_t j : cols) {
            features.push_back(d.at(i, j));
        }
        labels.push_back(d.labels()[i]);
    }
    return Dataset(std::move(names), std::move(features), std::move(labels));
}

struct HyperRange {
    const char* name;
    double lo;
    double hi;
    bool integral;
};

const std::vector<HyperRange>& ranker_ranges(RankerKind kind) {
    static const std::vector<HyperRange> none = {};
    static const std::vector<HyperRange> relief = {{"n_neighbors", 1, 1e9, true},
                                                   {"sample_size", 0, 1e9, true}};
    static const std::vector<HyperRange> wrapper = {{"inner_folds", 2, 1e6, true},
                                                    {"max_steps", 0, 1e9, true}};
    static const std::vector<HyperRange> rfe = {{"chunk_fraction", 0.0, 1.0, false},
                                                {"C", 1e-300, 1e9, false},
                                                {"tol", 1e-300, 1.0, false}};
    static const std::vector<HyperRange> forest = {{"n_trees", 1, 1e6, true},
                                                   {"mtry", 0, 1e9, true},
                                                   {"max_depth", 0, 1e9, true}};
    switch (kind) {
        case RankerKind::Pearson: return none;
        case RankerKind::Relief: return relief;
        case RankerKind::SvmWrapper:
        case RankerKind::NnWrapper: return wrapper;
        case RankerKind::SvmRfe: return rfe;
        case RankerKind::RandomForest: return forest;
    }
    return none;
}

}  // namespace

std::string to_string(RankerKind kind) {
    switch (kind) {
        case RankerKind::Pearson: return "Pearson";
        case RankerKind::Relief: return "Relief";
        case RankerKind::SvmWrapper: return "SvmWrapper";
        case RankerKind::NnWrapper: return "NnWrapper";
        case RankerKind::SvmRfe: return "SvmRfe";
        case RankerKind::RandomForest: return "RandomForest";
    }
    return "Pearson";
}

RankerKind ranker_kind_from_string(const std::string& name) {
    if (name == "Pearson") return RankerKind::Pearson;
    if (name == "Relief") return RankerKind::Relief;
    if (name == "SvmWrapper") return RankerKind::SvmWrapper;
    if (name == "NnWrapper") return RankerKind::NnWrapper;
    if (name == "SvmRfe") return RankerKind::SvmRfe;
    if (name == "RandomForest") return RankerKind::RandomForest;
    throw ConfigError("unknown ranker kind: " + name);
}

void validate_ranker_spec(const RankerSpec& spec) {
    const auto& ranges = ranker_ranges(spec.kind);
    for (const auto& [name, value] : spec.hyperparameters) {
        const HyperRange* found = nullptr;
        for (const auto& r : ranges) {
            if (name == r.name) {
                found = &r;
                break;
            }
        }
        if (found == nullptr) {
            throw ConfigError("unknown hyperparameter for " + to_string(spec.kind) + ": " +
                              name);
        }
        if (!std::isfinite(value) || value < found->lo || value > found->hi) {
            throw ConfigError("hyperparameter out of range: " + name);
        }
        if (found->integral && value != std::floor(value)) {
            throw ConfigError("hyperparameter must be an integer: " + name);
        }
    }
}

RankingVector rank_pearson(const Dataset& d) {
    std::vector<double> score(d.cols());
    for (std::size_t j = 0; j < d.cols(); ++j) {
        score[j] = abs_label_correlation(d, j);
    }
    return ranking_from_scores(score);
}

RankingVector rank_wrapper(const Dataset& d, const ClassifierSpec& inner,
                           const RankerSpec& spec, std::uint64_t seed,
                           WarningSink* warnings) {
    if (inner.kind != ClassifierKind::SVM && inner.kind != ClassifierKind::NN) {
        throw ConfigError("wrapper inner classifier must be SVM or NN");
    }
    validate_classifier_spec(inner);
    validate_ranker_spec(spec);
    std::size_t p = d.cols();
    if (p == 1) {
        return RankingVector{{1.0}};
    }
    std::size_t folds = static_cast<std::size_t>(spec.get("inner_folds", 3));
    std::size_t max_steps = static_cast<std::size_t>(spec.get("max_steps", 0));
    std::size_t limit = max_steps == 0 ? p : std::min(max_steps, p);

    std::vector<std::size_t> assignment =
        stratified_folds(d.labels(), folds, derive_seed(seed, "wrapper-folds", 0));
    std::vector<std::vector<std::size_t>> train_rows(folds), test_rows(folds);
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t f = 0; f < folds; ++f) {
            (assignment[i] == f ? test_rows[f] : train_rows[f]).push_back(i);
        }
    }
    bool pooled = false;
    for (std::size_t f = 0; f < folds; ++f) {
        bool pos = false, neg = false;
        for (std::size_t i : test_rows[f]) {
            (d.labels()[i] == 1 ? pos : neg) = true;
        }
        if (!pos || !neg) {
            pooled = true;
        }
    }
    if (pooled) {
        warn(warnings, "wrapper inner folds have a single-class test fold; pooled AUC used");
    }

    // inner-CV AUC of one candidate feature set
    auto evaluate = [&](const std::vector<std::size_t>& cols, std::uint64_t train_seed_base,
                        bool& failed) -> double {
        std::vector<double> pooled_scores(d.rows(), 0.0);
        std::vector<double> fold_aucs;
        for (std::size_t f = 0; f < folds; ++f) {
            Dataset train_set = subset_dataset(d, train_rows[f], cols);
            TrainedModel model = [&] {
                return train(inner, train_set, derive_seed(seed, "wrapper-train",
                                                           train_seed_base + f),
                             nullptr);
            }();
            std::vector<double> buf;
            buf.reserve(test_rows[f].size() * cols.size());
            for (std::size_t i : test_rows[f]) {
                for (std::size_t j : cols) {
                    buf.push_back(d.at(i, j));
                }
            }
            std::vector<double> scores =
                model.score(MatrixView{buf.data(), test_rows[f].size(), cols.size()});
            if (pooled) {
                for (std::size_t t = 0; t < test_rows[f].size(); ++t) {
                    pooled_scores[test_rows[f][t]] = scores[t];
                }
            } else {
                std::vector<int> ye;
                ye.reserve(test_rows[f].size());
                for (std::size_t i : test_rows[f]) {
                    ye.push_back(d.labels()[i]);
                }
                fold_aucs.push_back(auc(scores, ye));
            }
        }
        failed = false;
        if (pooled) {
            return auc(pooled_scores, d.labels());
        }
        return std::accumulate(fold_aucs.begin(), fold_aucs.end(), 0.0) /
               static_cast<double>(folds);
    };

    std::vector<std::size_t> selected;
    std::vector<char> in_model(p, 0);
    std::vector<double> last_candidate_auc(p, 0.0);
    std::vector<std::size_t> cols;
    for (std::size_t step = 0; step < limit; ++step) {
        double best_auc = -1.0;
        std::size_t best_j = p;
        for (std::size_t j = 0; j < p; ++j) {
            if (in_model[j]) {
                continue;
            }
            cols = selected;
            cols.push_back(j);
            std::sort(cols.begin(), cols.end());
            double value = 0.0;
            bool failed = true;
            try {
                value = evaluate(cols, (step * p + j) * folds, failed);
            } catch (const Error&) {
                failed = true;
            }
            if (failed) {
                value = 0.0;
                warn(warnings, "wrapper candidate training failed; feature " +
                                   d.feature_names()[j] + " scored 0 at step " +
                                   std::to_string(step + 1));
            }
            last_candidate_auc[j] = value;
            if (value > best_auc) {
                best_auc = value;
                best_j = j;
            }
        }
        selected.push_back(best_j);
        in_model[best_j] = 1;
    }

    RankingVector r;
    r.ranks.resize(p);
    for (std::size_t t = 0; t < selected.size(); ++t) {
        r.ranks[selected[t]] = static_cast<double>(t + 1);
    }
    if (selected.size() < p) {
        // leftover features keep their final-step candidate score ordering
        std::vector<std::size_t> rest;
        for (std::size_t j = 0; j < p; ++j) {
            if (!in_model[j]) {
                rest.push_back(j);
            }
        }
        std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
            return last_candidate_auc[a] > last_candidate_auc[b];
        });
        for (std::size_t t = 0; t < rest.size(); ++t) {
            r.ranks[rest[t]] = static_cast<double>(selected.size() + t + 1);
        }
    }
    return r;
}

RankingVector rank_svm_rfe(const Dataset& d, const RankerSpec& spec, std::uint64_t seed,
                           WarningSink* warnings, RfeTrace* trace) {
    (void)seed;  // elimination is deterministic; the seed is part of the uniform interface
    validate_ranker_spec(spec);
    std::size_t p = d.cols();
    double chunk_fraction = spec.get("chunk_fraction", 0.0);
    SvmTrainOptions opt;
    opt.kernel = KernelKind::Linear;
    opt.c = spec.get("C", 1.0);
    opt.tol = spec.get("tol", 1e-3);

    std::vector<std::size_t> surviving(p);
    std::iota(surviving.begin(), surviving.end(), std::size_t{0});
    std::vector<std::size_t> eliminated;  // first entry = worst rank
    std::vector<std::size_t> all_rows(d.rows());
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

    while (surviving.size() > 1) {
        std::size_t m = surviving.size();
        Dataset sub = subset_dataset(d, all_rows, surviving);
        auto [scaled, scaler] = standardize(sub);
        std::vector<double> weight_sq(m, 0.0);
        bool ok = true;
        try {
            SvmModel svm = train_svm(scaled.matrix(), scaled.labels(), opt);
            for (std::size_t t = 0; t < m; ++t) {
                weight_sq[t] = svm.linear_weights[t] * svm.linear_weights[t];
            }
        } catch (const Error&) {
            ok = false;
        }
        if (!ok) {
            warn(warnings, "linear SVM failed at " + std::to_string(m) +
                               " surviving features; using |correlation| for this step");
            if (trace) {
                ++trace->fallbacks;
            }
            for (std::size_t t = 0; t < m; ++t) {
                double c = abs_label_correlation(d, surviving[t]);
                weight_sq[t] = c * c;
            }
        }

        std::size_t chunk = 1;
        if (chunk_fraction > 0.0) {
            chunk = static_cast<std::size_t>(chunk_fraction * static_cast<double>(m));
        }
        chunk = std::clamp<std::size_t>(chunk, 1, m - 1);

        // weakest first; equal weights drop the higher index first
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (weight_sq[a] != weight_sq[b]) {
                return weight_sq[a] < weight_sq[b];
            }
            return surviving[a] > surviving[b];
        });
        std::vector<char> drop(m, 0);
        for (std::size_t t = 0; t < chunk; ++t) {
            drop[order[t]] = 1;
            eliminated.push_back(surviving[order[t]]);
        }
        std::vector<std::size_t> next;
        next.reserve(m - chunk);
        for (std::size_t t = 0; t < m; ++t) {
            if (!drop[t]) {
                next.push_back(surviving[t]);
            }
        }
        surviving = std::move(next);
        if (trace) {
            ++trace->iterations;
        }
    }
    eliminated.push_back(surviving[0]);

    RankingVector r;
    r.ranks.resize(p);
    for (std::size_t t = 0; t < p; ++t) {
        r.ranks[eliminated[t]] = static_cast<double>(p - t);
    }
    return r;
}

RankingVector rank_random_forest(const Dataset& d, const RankerSpec& spec, std::uint64_t seed) {
    validate_ranker_spec(spec);
    ForestOptions opt;
    opt.n_trees = static_cast<std::size_t>(spec.get("n_trees", 200));
    opt.mtry = static_cast<std::size_t>(spec.get("mtry", 0));
    opt.max_depth = static_cast<std::size_t>(spec.get("max_depth", 0));
    std::vector<double> importance = forest_importance(d.matrix(), d.labels(), opt, seed);
    return ranking_from_scores(importance);
}

RankingVector rank(const RankerSpec& spec, const Dataset& d, std::uint64_t seed,
                   WarningSink* warnings) {
    validate_ranker_spec(spec);
    switch (spec.kind) {
        case RankerKind::Pearson: return rank_pearson(d);
        case RankerKind::Relief: return rank_relief(d, spec, seed);
        case RankerKind::SvmWrapper:
            return rank_wrapper(d, ClassifierSpec{ClassifierKind::SVM, {}}, spec, seed,
                                warnings);
        case RankerKind::NnWrapper:
            return rank_wrapper(d, ClassifierSpec{ClassifierKind::NN, {}}, spec, seed,
                                warnings);
        case RankerKind::SvmRfe: return rank_svm_rfe(d, spec, seed, warnings);
        case RankerKind::RandomForest: return rank_random_forest(d, spec, seed);
    }
    throw ConfigError("unknown ranker kind");
}

RankingEnsemble run_ensemble(const RankerSpec& spec, const Dataset& d, std::size_t runs,
                             double fraction, std::uint64_t seed, unsigned threads,
                             WarningSink* warnings) {
    validate_ranker_spec(spec);
    if (runs < 2) {
        throw ConfigError("ensemble needs at least 2 runs");
    }
    std::vector<std::uint64_t> rank_seeds(runs), sub_seeds(runs);
    for (std::size_t i = 0; i < runs; ++i) {
        rank_seeds[i] = derive_seed(seed, "ensemble-rank", i);
        sub_seeds[i] = derive_seed(seed, "ensemble-subsample", i);
    }
    std::vector<RankingVector> rankings(runs);
    std::vector<WarningSink> sinks(runs);
    parallel_for(runs, threads, [&](std::size_t i) {
        Dataset sub = subsample(d, fraction, sub_seeds[i]);
        rankings[i] = rank(spec, sub, rank_seeds[i], &sinks[i]);
        validate_ranking(rankings[i], true);
    });
    if (warnings) {
        for (std::size_t i = 0; i < runs; ++i) {
            for (const std::string& msg : sinks[i].messages()) {
                warnings->add("run " + std::to_string(i + 1) + ": " + msg);
            }
        }
    }
    return make_ensemble(to_string(spec.kind), std::move(rankings), std::move(rank_seeds));
}

}  // namespace rankstab
