#include "rankstab/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "rankstab/ingest.hpp"
#include "rankstab/linear.hpp"
#include "rankstab/nn.hpp"
#include "rankstab/svm.hpp"
#include "rankstab/tree.hpp"

namespace rankstab {

namespace {

double cosine_distance(const double* a, const double* b, std::size_t p) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        dot += a[j] * b[j];
        na += a[j] * a[j];
        nb += b[j] * b[j];
    }
    if (na <= 0.0 || nb <= 0.0) {
        return 1.0;  // zero vectors get similarity 0
    }
    return 1.0 - dot / std::sqrt(na * nb);
}

std::vector<double> gather_rows(MatrixView x, const std::vector<std::size_t>& rows) {
    std::vector<double> out;
    out.reserve(rows.size() * x.cols);
    for (std::size_t i : rows) {
        const double* r = x.row(i);
        out.insert(out.end(), r, r + x.cols);
    }
    return out;
}

struct LrModel final : ModelImpl {
    std::vector<double> w;
    bool conv = false;
    std::size_t p = 0;

    std::vector<double> score(MatrixView x) const override { return logistic_predict(w, x); }
    double decision_threshold() const override { return 0.5; }
    bool converged() const override { return conv; }
    std::size_t features() const override { return p; }
};

struct KnnModel final : ModelImpl {
    Standardizer scaler;
    std::vector<double> xs;  // standardized training rows
    std::vector<int> ys;
    std::size_t k = 0;
    std::size_t p = 0;
    std::size_t m = 0;

    std::vector<double> score(MatrixView x) const override {
        std::vector<double> out(x.rows);
        std::vector<double> q(p);
        std::vector<std::pair<double, std::size_t>> dist(m);
        for (std::size_t i = 0; i < x.rows; ++i) {
            std::copy(x.row(i), x.row(i) + p, q.begin());
            scaler.transform_row(q.data(), p);
            for (std::size_t t = 0; t < m; ++t) {
                dist[t] = {cosine_distance(q.data(), xs.data() + t * p, p), t};
            }
            std::sort(dist.begin(), dist.end());
            std::size_t votes = 0;
            for (std::size_t t = 0; t < k; ++t) {
                votes += static_cast<std::size_t>(ys[dist[t].second] == 1);
            }
            out[i] = static_cast<double>(votes) / static_cast<double>(k);
        }
        return out;
    }
    double decision_threshold() const override { return 0.5; }
    std::size_t features() const override { return p; }
};

struct SvmClassifier final : ModelImpl {
    Standardizer scaler;
    SvmModel svm;

    std::vector<double> score(MatrixView x) const override {
        std::vector<double> out(x.rows);
        std::vector<double> q(svm.n_features);
        for (std::size_t i = 0; i < x.rows; ++i) {
            std::copy(x.row(i), x.row(i) + svm.n_features, q.begin());
            scaler.transform_row(q.data(), svm.n_features);
            out[i] = svm.decision(q.data());
        }
        return out;
    }
    double decision_threshold() const override { return 0.0; }
    bool converged() const override { return svm.converged; }
    std::size_t features() const override { return svm.n_features; }
};

struct BtModel final : ModelImpl {
    BoostedTrees bt;
    std::size_t p = 0;

    std::vector<double> score(MatrixView x) const override { return bt.decision_values(x); }
    double decision_threshold() const override { return 0.0; }
    std::size_t features() const override { return p; }
};

struct NnModel final : ModelImpl {
    std::vector<double> params;
    std::size_t hidden = 0;
    std::size_t p = 0;
    bool conv = false;
    std::vector<std::size_t> test_indices;

    std::vector<double> score(MatrixView x) const override {
        std::vector<double> out(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) {
            double z = mlp_decision(params, hidden, x.row(i), p);
            out[i] = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                              : std::exp(z) / (1.0 + std::exp(z));
        }
        return out;
    }
    double decision_threshold() const override { return 0.5; }
    bool converged() const override { return conv; }
    std::size_t features() const override { return p; }
    const std::vector<std::size_t>* holdout() const override { return &test_indices; }
};

struct HyperRange {
    const char* name;
    double lo;
    double hi;
    bool integral;
};

const std::vector<HyperRange>& ranges_for(ClassifierKind kind) {
    static const std::vector<HyperRange> lr = {{"max_iter", 1, 1e9, true},
                                               {"tol", 1e-300, 1.0, false},
                                               {"ridge", 0.0, 1e9, false}};
    static const std::vector<HyperRange> knn = {{"k", 1, 1e9, true}};
    static const std::vector<HyperRange> svm = {{"C", 1e-300, 1e9, false},
                                                {"gamma", 0.0, 1e9, false},
                                                {"tol", 1e-300, 1.0, false},
                                                {"max_iter", 0, 1e9, true}};
    static const std::vector<HyperRange> bt = {{"rounds", 1, 1e6, true},
                                               {"learn_rate", 1e-300, 1.0, false},
                                               {"max_splits", 1, 1e6, true}};
    static const std::vector<HyperRange> nn = {{"hidden", 1, 1e6, true},
                                               {"epochs", 1, 1e6, true},
                                               {"learn_rate", 1e-300, 100.0, false},
                                               {"momentum", 0.0, 0.999999, false},
                                               {"patience", 1, 1e6, true},
                                               {"reps", 1, 1000, true}};
    switch (kind) {
        case ClassifierKind::LR: return lr;
        case ClassifierKind::KNN: return knn;
        case ClassifierKind::SVM: return svm;
        case ClassifierKind::BT: return bt;
        case ClassifierKind::NN: return nn;
    }
    return lr;
}

// stratified 60/20/20 split used by the NN protocol
struct ThreeWaySplit {
    std::vector<std::size_t> train, val, test;
};

ThreeWaySplit split_60_20_20(const std::vector<int>& labels, std::uint64_t seed) {
    ThreeWaySplit out;
    Rng rng(seed);
    for (int cls : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) {
                idx.push_back(i);
            }
        }
        if (idx.size() < 3) {
            throw DataError("NN protocol needs at least 3 instances per class");
        }
        rng.shuffle(idx);
        std::size_t n_tr = std::max<std::size_t>(1, idx.size() * 6 / 10);
        std::size_t n_val = std::max<std::size_t>(1, idx.size() * 2 / 10);
        while (n_tr + n_val >= idx.size()) {
            if (n_tr > 1) {
                --n_tr;
            } else {
                --n_val;
            }
        }
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + n_tr);
        out.val.insert(out.val.end(), idx.begin() + n_tr, idx.begin() + n_tr + n_val);
        out.test.insert(out.test.end(), idx.begin() + n_tr + n_val, idx.end());
    }
    std::sort(out.test.begin(), out.test.end());
    return out;
}

}  // namespace

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::LR: return "LR";
        case ClassifierKind::KNN: return "KNN";
        case ClassifierKind::SVM: return "SVM";
        case ClassifierKind::BT: return "BT";
        case ClassifierKind::NN: return "NN";
    }
    return "LR";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
    if (name == "LR") return ClassifierKind::LR;
    if (name == "KNN") return ClassifierKind::KNN;
    if (name == "SVM") return ClassifierKind::SVM;
    if (name == "BT") return ClassifierKind::BT;
    if (name == "NN") return ClassifierKind::NN;
    throw ConfigError("unknown classifier kind: " + name);
}

void validate_classifier_spec(const ClassifierSpec& spec) {
    const auto& ranges = ranges_for(spec.kind);
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

std::vector<double> TrainedModel::score(MatrixView x) const {
    if (x.rows == 0) {
        return {};
    }
    if (x.cols != impl_->features()) {
        throw DataError("score: feature count mismatch");
    }
    return impl_->score(x);
}

TrainedModel train(const ClassifierSpec& spec, const Dataset& d, std::uint64_t seed,
                   WarningSink* warnings) {
    validate_classifier_spec(spec);
    MatrixView x = d.matrix();
    const std::vector<int>& y = d.labels();

    switch (spec.kind) {
        case ClassifierKind::LR: {
            auto model = std::make_shared<LrModel>();
            LogisticFit fit =
                fit_logistic(x, y, spec.get("tol", 1e-6),
                             static_cast<std::size_t>(spec.get("max_iter", 100)),
                             spec.get("ridge", 0.0));
            if (!fit.converged) {
                warn(warnings, "LR did not converge within the iteration cap");
            }
            model->w = std::move(fit.weights);
            model->conv = fit.converged;
            model->p = d.cols();
            return TrainedModel(spec, std::move(model));
        }
        case ClassifierKind::KNN: {
            auto model = std::make_shared<KnnModel>();
            std::size_t k = static_cast<std::size_t>(spec.get("k", 47));
            if (d.rows() <= k) {
                k = d.rows() - 1;
                warn(warnings, "KNN k clamped to " + std::to_string(k));
            }
            if (k == 0) {
                k = 1;
            }
            model->scaler = Standardizer::fit(x);
            model->xs = model->scaler.transform_matrix(x);
            model->ys = y;
            model->k = k;
            model->p = d.cols();
            model->m = d.rows();
            return TrainedModel(spec, std::move(model));
        }
        case ClassifierKind::SVM: {
            auto model = std::make_shared<SvmClassifier>();
            model->scaler = Standardizer::fit(x);
            std::vector<double> xs = model->scaler.transform_matrix(x);
            MatrixView xv{xs.data(), d.rows(), d.cols()};
            SvmTrainOptions opt;
            opt.kernel = KernelKind::Gaussian;
            opt.c = spec.get("C", 1.0);
            opt.gamma = spec.get("gamma", 0.0);
            opt.tol = spec.get("tol", 1e-3);
            opt.max_sweeps = static_cast<std::size_t>(spec.get("max_iter", 0));
            model->svm = train_svm(xv, y, opt);
            if (!model->svm.converged) {
                warn(warnings, "SVM did not reach KKT tolerance within the sweep cap");
            }
            return TrainedModel(spec, std::move(model));
        }
        case ClassifierKind::BT: {
            auto model = std::make_shared<BtModel>();
            model->bt = BoostedTrees::fit(x, y, static_cast<std::size_t>(spec.get("rounds", 100)),
                                          spec.get("learn_rate", 0.1),
                                          static_cast<std::size_t>(spec.get("max_splits", 20)));
            model->p = d.cols();
            return TrainedModel(spec, std::move(model));
        }
        case ClassifierKind::NN: {
            auto model = std::make_shared<NnModel>();
            ThreeWaySplit split = split_60_20_20(y, derive_seed(seed, "nn-split", 0));
            std::vector<double> xtr = gather_rows(x, split.train);
            std::vector<double> xva = gather_rows(x, split.val);
            std::vector<int> ytr, yva;
            ytr.reserve(split.train.size());
            for (std::size_t i : split.train) ytr.push_back(y[i]);
            for (std::size_t i : split.val) yva.push_back(y[i]);
            MlpOptions opts;
            opts.hidden = static_cast<std::size_t>(spec.get("hidden", 4));
            opts.epochs = static_cast<std::size_t>(spec.get("epochs", 100));
            opts.learn_rate = spec.get("learn_rate", 0.5);
            opts.momentum = spec.get("momentum", 0.9);
            opts.patience = static_cast<std::size_t>(spec.get("patience", 6));
            MlpFit fit = train_mlp(MatrixView{xtr.data(), split.train.size(), d.cols()}, ytr,
                                   MatrixView{xva.data(), split.val.size(), d.cols()}, yva,
                                   opts, derive_seed(seed, "nn-init", 0));
            model->conv = fit.early_stopped;
            if (!fit.early_stopped) {
                warn(warnings, "NN hit the epoch cap before validation loss stopped improving");
            }
            model->params = std::move(fit.params);
            model->hidden = opts.hidden;
            model->p = d.cols();
            model->test_indices = std::move(split.test);
            return TrainedModel(spec, std::move(model));
        }
    }
    throw ConfigError("unknown classifier kind");
}

std::vector<std::size_t> stratified_folds(const std::vector<int>& labels, std::size_t folds,
                                          std::uint64_t seed) {
    if (folds < 2 || folds > labels.size()) {
        throw ConfigError("folds must be between 2 and the instance count");
    }
    std::vector<std::size_t> assignment(labels.size());
    Rng rng(seed);
    std::size_t counter = 0;
    for (int cls : {1, 0}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) {
                idx.push_back(i);
            }
        }
        if (idx.size() < 2) {
            throw DataError("class too small to stratify");
        }
        rng.shuffle(idx);
        for (std::size_t i : idx) {
            assignment[i] = counter++ % folds;
        }
    }
    return assignment;
}

EvalResult cross_validate(const ClassifierSpec& spec, const Dataset& d, std::size_t folds,
                          std::uint64_t seed, WarningSink* warnings) {
    validate_classifier_spec(spec);
    EvalResult result;
    result.seed = seed;

    if (spec.kind == ClassifierKind::NN) {
        // repeated 60/20/20 protocol instead of k-fold
        std::size_t reps = static_cast<std::size_t>(spec.get("reps", 3));
        MatrixView x = d.matrix();
        for (std::size_t r = 0; r < reps; ++r) {
            TrainedModel model = train(spec, d, derive_seed(seed, "nn-rep", r), warnings);
            const std::vector<std::size_t>& held = *model.holdout();
            std::vector<double> xe = gather_rows(x, held);
            std::vector<int> ye;
            ye.reserve(held.size());
            for (std::size_t i : held) ye.push_back(d.labels()[i]);
            std::vector<double> scores =
                model.score(MatrixView{xe.data(), held.size(), d.cols()});
            result.fold_aucs.push_back(auc(scores, ye));
            result.fold_accuracies.push_back(accuracy(scores, ye, model.decision_threshold()));
        }
        result.auc = std::accumulate(result.fold_aucs.begin(), result.fold_aucs.end(), 0.0) /
                     static_cast<double>(reps);
        result.accuracy = std::accumulate(result.fold_accuracies.begin(),
                                          result.fold_accuracies.end(), 0.0) /
                          static_cast<double>(reps);
        return result;
    }

    std::vector<std::size_t> assignment =
        stratified_folds(d.labels(), folds, derive_seed(seed, "cv-folds", 0));
    MatrixView x = d.matrix();

    std::vector<double> pooled_scores(d.rows());
    bool any_single_class_fold = false;
    std::vector<std::vector<double>> fold_scores(folds);
    std::vector<std::vector<int>> fold_labels(folds);
    double threshold = 0.0;

    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < d.rows(); ++i) {
            (assignment[i] == f ? test_rows : train_rows).push_back(i);
        }
        if (test_rows.empty()) {
            throw ConfigError("empty cross-validation fold");
        }
        Dataset train_set = [&] {
            try {
                return d.select_rows(train_rows);
            } catch (const DataError&) {
                throw DataError("single-class training fold " + std::to_string(f));
            }
        }();
        TrainedModel model = train(spec, train_set, derive_seed(seed, "cv-train", f), warnings);
        threshold = model.decision_threshold();
        std::vector<double> xe = gather_rows(x, test_rows);
        std::vector<double> scores =
            model.score(MatrixView{xe.data(), test_rows.size(), d.cols()});
        bool pos = false, neg = false;
        for (std::size_t t = 0; t < test_rows.size(); ++t) {
            pooled_scores[test_rows[t]] = scores[t];
            fold_labels[f].push_back(d.labels()[test_rows[t]]);
            (d.labels()[test_rows[t]] == 1 ? pos : neg) = true;
        }
        fold_scores[f] = std::move(scores);
        if (!pos || !neg) {
            any_single_class_fold = true;
        }
    }

    if (any_single_class_fold) {
        warn(warnings, "single-class test fold; reporting pooled out-of-fold AUC");
        result.auc = auc(pooled_scores, d.labels());
        result.accuracy = accuracy(pooled_scores, d.labels(), threshold);
        return result;
    }
    for (std::size_t f = 0; f < folds; ++f) {
        result.fold_aucs.push_back(auc(fold_scores[f], fold_labels[f]));
        result.fold_accuracies.push_back(accuracy(fold_scores[f], fold_labels[f], threshold));
    }
    result.auc = std::accumulate(result.fold_aucs.begin(), result.fold_aucs.end(), 0.0) /
                 static_cast<double>(folds);
    result.accuracy = std::accumulate(result.fold_accuracies.begin(),
                                      result.fold_accuracies.end(), 0.0) /
                      static_cast<double>(folds);
    return result;
}

EvalResult evaluate_subset(const ClassifierSpec& spec, const Dataset& d, const TopKMask& mask,
                           std::size_t folds, std::uint64_t seed, WarningSink* warnings) {
    if (mask.included.size() != d.cols()) {
        throw ConfigError("mask length does not match feature count");
    }
    if (mask.k == 0) {
        throw ConfigError("mask must keep at least one feature");
    }
    std::vector<std::size_t> keep = mask.indices();
    if (keep.size() != mask.k) {
        throw ConfigError("mask k does not match included count");
    }
    if (keep.size() == d.cols()) {
        return cross_validate(spec, d, folds, seed, warnings);
    }
    Dataset sub = d.select_features(mask);
    return cross_validate(spec, sub, folds, seed, warnings);
}

}  // namespace rankstab
