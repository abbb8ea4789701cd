#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rankstab/classifiers.hpp"
#include "rankstab/mds.hpp"
#include "rankstab/rankers.hpp"
#include "rankstab/stability.hpp"
#include "rankstab/types.hpp"

namespace rankstab {

// Full-study configuration. Empty grids are resolved against the dataset
// width p: curve grid becomes 1..p, the Jaccard grid becomes
// {10,20,30,35,40,50,60,70,80,90,p} clipped to [1,p].
struct PipelineConfig {
    std::vector<RankerSpec> rankers;
    std::vector<ClassifierSpec> classifiers;
    std::size_t runs = 7;
    double fraction = 0.7;
    std::size_t folds = 5;
    std::vector<std::size_t> curve_grid;
    std::vector<std::size_t> jaccard_grid;
    std::vector<std::size_t> caps = {40, 55, 70};
    std::uint64_t master_seed = 0;
    std::string output_dir;  // empty = no partial flush on stage failure
    unsigned threads = 1;    // never serialized; results are thread-count invariant
};

// All six rankers / all five classifiers with default hyperparameters.
std::vector<RankerSpec> default_ranker_suite();
std::vector<ClassifierSpec> default_classifier_suite();

// Fills empty grids from p, sorts and deduplicates them, then validates
// every invariant. Throws ConfigError.
PipelineConfig resolve_pipeline_config(const PipelineConfig& cfg, std::size_t p);

struct CurvePoint {
    std::size_t k = 0;
    double auc = 0.0;
};

struct CurveResult {
    std::string ranker_name;
    std::string classifier_name;
    std::vector<CurvePoint> points;   // one per grid k, ascending k
    double baseline_auc = 0.0;        // full-feature-set CV of the same classifier
};

struct BestSubsetEntry {
    std::size_t k = 0;
    std::string ranker_name;
    double auc = 0.0;
};

// Per (classifier, cap): the best three curve points with k <= cap,
// descending auc, ties by ascending k then ranker name.
struct BestSubsetRow {
    std::string classifier_name;
    std::size_t cap = 0;
    std::vector<BestSubsetEntry> entries;
};

struct StabilityReport {
    PipelineConfig config;  // grids resolved
    std::size_t rows = 0;
    std::size_t features = 0;
    std::size_t positives = 0;
    std::vector<std::string> feature_names;
    std::vector<RankingEnsemble> ensembles;                      // config ranker order
    std::vector<RankingVector> aggregated;                       // median ranking per ensemble
    std::vector<std::pair<std::string, EvalResult>> baselines;   // (classifier, full-set CV)
    std::vector<CurveResult> curves;                             // ranker-major, classifier-minor
    std::vector<BestSubsetRow> best_subsets;
    std::vector<StabilityScore> spearman_stability;              // parallel to ensembles
    std::vector<JaccardProfile> jaccard_profiles;                // parallel to ensembles
    DissimilarityMatrix dissimilarity;
    Embedding embedding;
    std::vector<std::pair<std::string, double>> dispersions;     // sorted by ranker name
    std::vector<std::string> warnings;
};

// Runs ensembles, aggregation, AUC-vs-k curves, the best-subset table,
// Spearman stability, Jaccard profiles, and the MDS embedding. A stage
// failure rethrows the error prefixed with the stage name after flushing
// whatever is already computed to cfg.output_dir (when set).
StabilityReport run_pipeline(const PipelineConfig& cfg, const Dataset& d);

struct CompareRow {
    std::string set_name;
    std::string classifier_name;
    std::size_t k = 0;
    double auc = 0.0;
};

// Evaluates every named feature set with every classifier, preceded by a
// "full" baseline row per classifier.
std::vector<CompareRow> compare_feature_sets(const Dataset& d,
                                             const std::vector<std::pair<std::string, TopKMask>>& sets,
                                             const std::vector<ClassifierSpec>& classifiers,
                                             std::size_t folds, std::uint64_t seed,
                                             WarningSink* warnings = nullptr);

TopKMask mask_intersection(const TopKMask& a, const TopKMask& b);

struct ManifestEntry {
    std::string path;  // relative to the output directory, '/' separators
    std::uint64_t bytes = 0;
    std::string fnv1a64;  // 16 hex digits of the file content hash
};

// Writes report.json, per-curve CSV/SVG files, stability_spearman.csv,
// jaccard_profile.csv, mds_coords.csv, mds_plot.svg, and manifest.json.
// Returns the manifest (which lists every written file except itself).
std::vector<ManifestEntry> emit_report(const StabilityReport& report, const std::string& dir);

}  // namespace rankstab
