#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rankstab/types.hpp"

namespace rankstab {

enum class ClassifierKind { LR, KNN, SVM, BT, NN };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

// A classifier choice plus hyperparameter overrides. Unknown names and
// out-of-range values are rejected by validate_classifier_spec.
//
// Defaults per kind:
//   LR   max_iter=100, tol=1e-6, ridge=0
//   KNN  k=47 (clamped to M-1 with a warning when M <= k)
//   SVM  C=1, gamma=0 (0 = 1/(p * median pairwise squared distance)),
//        tol=1e-3, max_iter=0 (0 = automatic cap)
//   BT   rounds=100, learn_rate=0.1, max_splits=20
//   NN   hidden=4, epochs=100, learn_rate=0.5, momentum=0.9, patience=6,
//        reps=3 (repeated 60/20/20 protocol used instead of k-fold CV)
struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::LR;
    std::map<std::string, double> hyperparameters;

    double get(const std::string& name, double fallback) const {
        auto it = hyperparameters.find(name);
        return it == hyperparameters.end() ? fallback : it->second;
    }
};

void validate_classifier_spec(const ClassifierSpec& spec);

class ModelImpl {
public:
    virtual ~ModelImpl() = default;
    virtual std::vector<double> score(MatrixView x) const = 0;
    virtual double decision_threshold() const = 0;
    virtual bool converged() const { return true; }
    virtual std::size_t features() const = 0;
    // NN only: indices of the internal 20% test portion of the training data
    virtual const std::vector<std::size_t>* holdout() const { return nullptr; }
};

// Immutable trained classifier; scoring is deterministic and thread-safe.
class TrainedModel {
public:
    TrainedModel(ClassifierSpec spec, std::shared_ptr<const ModelImpl> impl)
        : spec_(std::move(spec)), impl_(std::move(impl)) {}

    const ClassifierSpec& spec() const { return spec_; }
    bool converged() const { return impl_->converged(); }
    double decision_threshold() const { return impl_->decision_threshold(); }
    std::size_t features() const { return impl_->features(); }
    const std::vector<std::size_t>* holdout() const { return impl_->holdout(); }

    // one monotone class-1 score per row; higher = more case-like
    std::vector<double> score(MatrixView x) const;
    std::vector<double> score(const Dataset& d) const { return score(d.matrix()); }

private:
    ClassifierSpec spec_;
    std::shared_ptr<const ModelImpl> impl_;
};

TrainedModel train(const ClassifierSpec& spec, const Dataset& d, std::uint64_t seed,
                   WarningSink* warnings = nullptr);

// Mann-Whitney AUC with tie correction, O(n log n).
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

double accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                double threshold);

struct EvalResult {
    double auc = 0.0;
    double accuracy = 0.0;
    std::vector<double> fold_aucs;
    std::vector<double> fold_accuracies;
    std::uint64_t seed = 0;
};

// Stratified fold ids (0..folds-1) per instance; both classes need at least
// 2 members so every training fold sees both classes.
std::vector<std::size_t> stratified_folds(const std::vector<int>& labels, std::size_t folds,
                                          std::uint64_t seed);

// Stratified k-fold cross validation. For kind NN the estimate is instead
// the mean of `reps` repetitions of the internal 60/20/20 split protocol.
EvalResult cross_validate(const ClassifierSpec& spec, const Dataset& d, std::size_t folds,
                          std::uint64_t seed, WarningSink* warnings = nullptr);

EvalResult evaluate_subset(const ClassifierSpec& spec, const Dataset& d, const TopKMask& mask,
                           std::size_t folds, std::uint64_t seed,
                           WarningSink* warnings = nullptr);

}  // namespace rankstab
