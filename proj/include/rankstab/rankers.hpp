#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rankstab/classifiers.hpp"
#include "rankstab/types.hpp"

namespace rankstab {

enum class RankerKind { Pearson, Relief, SvmWrapper, NnWrapper, SvmRfe, RandomForest };

std::string to_string(RankerKind kind);
RankerKind ranker_kind_from_string(const std::string& name);

// Hyperparameters per kind (0 picks the documented automatic value):
//   Pearson       (none)
//   Relief        n_neighbors=10, sample_size=0 (0 = full pass)
//   SvmWrapper,
//   NnWrapper     inner_folds=3, max_steps=0 (0 = select all p features;
//                 otherwise stop after max_steps inclusions and rank the
//                 rest by their final-step candidate AUC)
//   SvmRfe        chunk_fraction=0 (0 = one feature per iteration), C=1,
//                 tol=1e-3
//   RandomForest  n_trees=200, mtry=0 (0 = floor(sqrt(p))), max_depth=0
//                 (0 = unlimited)
struct RankerSpec {
    RankerKind kind = RankerKind::Pearson;
    std::map<std::string, double> hyperparameters;

    double get(const std::string& name, double fallback) const {
        auto it = hyperparameters.find(name);
        return it == hyperparameters.end() ? fallback : it->second;
    }
};

void validate_ranker_spec(const RankerSpec& spec);

RankingVector rank_pearson(const Dataset& d);

// Raw ReliefF weights before the argsort, full pass unless sample_size > 0.
std::vector<double> relief_weights(const Dataset& d, std::size_t n_neighbors,
                                   std::size_t sample_size, std::uint64_t seed);

RankingVector rank_relief(const Dataset& d, const RankerSpec& spec, std::uint64_t seed);

// Sequential forward selection scored by inner-CV AUC of the given
// classifier (kind SVM or NN).
RankingVector rank_wrapper(const Dataset& d, const ClassifierSpec& inner,
                           const RankerSpec& spec, std::uint64_t seed,
                           WarningSink* warnings = nullptr);

struct RfeTrace {
    std::size_t iterations = 0;  // elimination rounds before the last survivor
    std::size_t fallbacks = 0;   // rounds scored by |correlation| after SVM failure
};

RankingVector rank_svm_rfe(const Dataset& d, const RankerSpec& spec, std::uint64_t seed,
                           WarningSink* warnings = nullptr, RfeTrace* trace = nullptr);

RankingVector rank_random_forest(const Dataset& d, const RankerSpec& spec, std::uint64_t seed);

// Dispatch on spec.kind; wrappers get default inner classifier specs.
RankingVector rank(const RankerSpec& spec, const Dataset& d, std::uint64_t seed,
                   WarningSink* warnings = nullptr);

// K rankings, each on an independent subsample of `fraction` rows. Runs may
// execute in parallel; output (rankings, seeds, warning order) is identical
// to sequential execution.
RankingEnsemble run_ensemble(const RankerSpec& spec, const Dataset& d, std::size_t runs,
                             double fraction, std::uint64_t seed, unsigned threads = 1,
                             WarningSink* warnings = nullptr);

}  // namespace rankstab
