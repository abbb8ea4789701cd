#include "rankstab/pipeline.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "rankstab/report.hpp"

namespace rankstab {

std::vector<RankerSpec> default_ranker_suite() {
    std::vector<RankerSpec> out;
    for (RankerKind kind : {RankerKind::Pearson, RankerKind::Relief, RankerKind::SvmWrapper,
                            RankerKind::NnWrapper, RankerKind::SvmRfe, RankerKind::RandomForest}) {
        RankerSpec spec;
        spec.kind = kind;
        out.push_back(spec);
    }
    return out;
}

std::vector<ClassifierSpec> default_classifier_suite() {
    std::vector<ClassifierSpec> out;
    for (ClassifierKind kind : {ClassifierKind::LR, ClassifierKind::KNN, ClassifierKind::SVM,
                                ClassifierKind::BT, ClassifierKind::NN}) {
        ClassifierSpec spec;
        spec.kind = kind;
        out.push_back(spec);
    }
    return out;
}

namespace {

std::vector<std::size_t> clean_grid(std::vector<std::size_t> grid, std::size_t p,
                                    const char* what) {
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (std::size_t k : grid)
        if (k < 1 || k > p) throw ConfigError(std::string(what) + " value out of [1, p]");
    return grid;
}

// duplicate base names get numbered suffixes so files and plot groups stay
// distinct when a kind appears twice in the configuration
std::vector<std::string> uniquify(const std::vector<std::string>& raw) {
    std::set<std::string> used;
    std::vector<std::string> out;
    for (const auto& base : raw) {
        std::string name = base;
        std::size_t suffix = 2;
        while (!used.insert(name).second) name = base + "_" + std::to_string(suffix++);
        out.push_back(name);
    }
    return out;
}

// seed per entry keyed by kind name plus occurrence index, so appending new
// kinds to a configuration never shifts existing seeds
template <typename Spec>
std::vector<std::uint64_t> keyed_seeds(const std::vector<Spec>& specs, std::uint64_t master,
                                       const std::string& prefix) {
    std::map<std::string, std::uint64_t> seen;
    std::vector<std::uint64_t> out;
    for (const auto& s : specs) {
        const std::string name = to_string(s.kind);
        out.push_back(derive_seed(master, prefix + name, seen[name]++));
    }
    return out;
}

}  // namespace

PipelineConfig resolve_pipeline_config(const PipelineConfig& cfg, std::size_t p) {
    if (p == 0) throw DataError("dataset has no features");
    PipelineConfig out = cfg;
    if (out.rankers.empty()) throw ConfigError("pipeline needs at least one ranker");
    if (out.classifiers.empty()) throw ConfigError("pipeline needs at least one classifier");
    for (const auto& r : out.rankers) validate_ranker_spec(r);
    for (const auto& c : out.classifiers) validate_classifier_spec(c);
    if (out.runs < 2) throw ConfigError("pipeline needs at least 2 ensemble runs");
    if (!(out.fraction > 0.0 && out.fraction <= 1.0))
        throw ConfigError("subsample fraction must lie in (0, 1]");
    if (out.folds < 2) throw ConfigError("cross validation needs at least 2 folds");

    if (out.curve_grid.empty()) {
        out.curve_grid.resize(p);
        std::iota(out.curve_grid.begin(), out.curve_grid.end(), std::size_t{1});
    } else {
        out.curve_grid = clean_grid(std::move(out.curve_grid), p, "curve grid");
    }
    if (out.jaccard_grid.empty()) {
        for (std::size_t k : {10u, 20u, 30u, 35u, 40u, 50u, 60u, 70u, 80u, 90u})
            if (k <= p) out.jaccard_grid.push_back(k);
        out.jaccard_grid.push_back(p);
    }
    out.jaccard_grid = clean_grid(std::move(out.jaccard_grid), p, "jaccard grid");
    std::sort(out.caps.begin(), out.caps.end());
    out.caps.erase(std::unique(out.caps.begin(), out.caps.end()), out.caps.end());
    for (std::size_t cap : out.caps)
        if (cap == 0) throw ConfigError("best-subset cap must be positive");
    return out;
}

StabilityReport run_pipeline(const PipelineConfig& cfg, const Dataset& d) {
    StabilityReport report;
    WarningSink sink;

    auto flush_partial = [&]() {
        if (cfg.output_dir.empty()) return;
        report.warnings = sink.messages();
        try {
            emit_report(report, cfg.output_dir);
        } catch (...) {
            // best-effort flush; the stage error wins
        }
    };
    auto rethrow = [&](const char* stage_name, const Error& e) {
        flush_partial();
        const std::string msg = std::string("stage ") + stage_name + ": " + e.what();
        if (dynamic_cast<const ConfigError*>(&e) != nullptr) throw ConfigError(msg);
        if (dynamic_cast<const DataError*>(&e) != nullptr) throw DataError(msg);
        if (dynamic_cast<const NumericError*>(&e) != nullptr) throw NumericError(msg);
        throw Error(msg);
    };

    try {
        report.config = resolve_pipeline_config(cfg, d.cols());
        report.rows = d.rows();
        report.features = d.cols();
        report.positives = d.positives();
        report.feature_names = d.feature_names();
    } catch (const Error& e) {
        rethrow("config", e);
    }
    const PipelineConfig& rc = report.config;
    const std::size_t n_rankers = rc.rankers.size();
    const std::size_t n_cls = rc.classifiers.size();
    const std::size_t n_k = rc.curve_grid.size();

    const std::vector<std::uint64_t> ranker_seeds = keyed_seeds(rc.rankers, rc.master_seed, "ensemble/");
    const std::vector<std::uint64_t> cls_seeds = keyed_seeds(rc.classifiers, rc.master_seed, "cv/");
    std::vector<std::string> cls_names;
    for (const auto& c : rc.classifiers) cls_names.push_back(to_string(c.kind));
    cls_names = uniquify(cls_names);

    try {
        std::vector<RankingEnsemble> ensembles;
        std::vector<RankingVector> aggregated;
        std::vector<std::string> ranker_names;
        for (const auto& r : rc.rankers) ranker_names.push_back(to_string(r.kind));
        ranker_names = uniquify(ranker_names);
        for (std::size_t i = 0; i < n_rankers; ++i) {
            WarningSink local;
            RankingEnsemble e = run_ensemble(rc.rankers[i], d, rc.runs, rc.fraction,
                                             ranker_seeds[i], rc.threads, &local);
            e.ranker_name = ranker_names[i];
            for (const auto& msg : local.messages())
                sink.add(ranker_names[i] + " ensemble: " + msg);
            aggregated.push_back(aggregate_median(e));
            ensembles.push_back(std::move(e));
        }
        report.ensembles = std::move(ensembles);
        report.aggregated = std::move(aggregated);
    } catch (const Error& e) {
        rethrow("ensemble", e);
    }

    try {
        std::vector<std::pair<std::string, EvalResult>> baselines;
        for (std::size_t c = 0; c < n_cls; ++c) {
            WarningSink local;
            EvalResult res = cross_validate(rc.classifiers[c], d, rc.folds, cls_seeds[c], &local);
            for (const auto& msg : local.messages())
                sink.add("baseline " + cls_names[c] + ": " + msg);
            baselines.emplace_back(cls_names[c], res);
        }
        report.baselines = std::move(baselines);
    } catch (const Error& e) {
        rethrow("baseline", e);
    }

    try {
        std::vector<CurveResult> curves(n_rankers * n_cls);
        for (std::size_t r = 0; r < n_rankers; ++r) {
            for (std::size_t c = 0; c < n_cls; ++c) {
                CurveResult& cr = curves[r * n_cls + c];
                cr.ranker_name = report.ensembles[r].ranker_name;
                cr.classifier_name = cls_names[c];
                cr.baseline_auc = report.baselines[c].second.auc;
                cr.points.resize(n_k);
            }
        }
        const std::size_t cells = n_rankers * n_cls * n_k;
        std::vector<WarningSink> cell_sinks(cells);
        parallel_for(cells, rc.threads, [&](std::size_t cell) {
            const std::size_t r = cell / (n_cls * n_k);
            const std::size_t c = (cell / n_k) % n_cls;
            const std::size_t ki = cell % n_k;
            const std::size_t k = rc.curve_grid[ki];
            const TopKMask mask = to_top_k(report.aggregated[r], k);
            EvalResult res = evaluate_subset(rc.classifiers[c], d, mask, rc.folds, cls_seeds[c],
                                             &cell_sinks[cell]);
            curves[r * n_cls + c].points[ki] = {k, res.auc};
        });
        for (std::size_t cell = 0; cell < cells; ++cell) {
            const std::size_t r = cell / (n_cls * n_k);
            const std::size_t c = (cell / n_k) % n_cls;
            const std::size_t ki = cell % n_k;
            for (const auto& msg : cell_sinks[cell].messages())
                sink.add("curve " + report.ensembles[r].ranker_name + "/" + cls_names[c] +
                         " k=" + std::to_string(rc.curve_grid[ki]) + ": " + msg);
        }
        report.curves = std::move(curves);
    } catch (const Error& e) {
        rethrow("curves", e);
    }

    try {
        std::vector<BestSubsetRow> rows;
        for (std::size_t c = 0; c < n_cls; ++c) {
            for (std::size_t cap : rc.caps) {
                BestSubsetRow row;
                row.classifier_name = cls_names[c];
                row.cap = cap;
                std::vector<BestSubsetEntry> candidates;
                for (std::size_t r = 0; r < n_rankers; ++r) {
                    const CurveResult& cr = report.curves[r * n_cls + c];
                    for (const auto& pt : cr.points)
                        if (pt.k <= cap) candidates.push_back({pt.k, cr.ranker_name, pt.auc});
                }
                std::sort(candidates.begin(), candidates.end(),
                          [](const BestSubsetEntry& a, const BestSubsetEntry& b) {
                              if (a.auc != b.auc) return a.auc > b.auc;
                              if (a.k != b.k) return a.k < b.k;
                              return a.ranker_name < b.ranker_name;
                          });
                if (candidates.size() > 3) candidates.resize(3);
                row.entries = std::move(candidates);
                rows.push_back(std::move(row));
            }
        }
        report.best_subsets = std::move(rows);
    } catch (const Error& e) {
        rethrow("best_subsets", e);
    }

    try {
        std::vector<StabilityScore> sp;
        std::vector<JaccardProfile> jp;
        for (const auto& e : report.ensembles) {
            sp.push_back(ensemble_stability(e, StabilityMetric::Spearman));
            jp.push_back(jaccard_profile(e, rc.jaccard_grid));
        }
        report.spearman_stability = std::move(sp);
        report.jaccard_profiles = std::move(jp);
    } catch (const Error& e) {
        rethrow("stability", e);
    }

    try {
        DissimilarityMatrix dis = rank_dissimilarity(report.ensembles);
        Embedding emb = embed(dis, derive_seed(rc.master_seed, "mds", 0));
        WarningSink local;
        std::map<std::string, double> disp = dispersion(emb, &local);
        for (const auto& msg : local.messages()) sink.add("mds: " + msg);
        report.dissimilarity = std::move(dis);
        report.embedding = std::move(emb);
        report.dispersions.assign(disp.begin(), disp.end());
    } catch (const Error& e) {
        rethrow("mds", e);
    }

    report.warnings = sink.messages();

    if (!cfg.output_dir.empty()) {
        try {
            emit_report(report, cfg.output_dir);
        } catch (const Error& e) {
            const std::string msg = std::string("stage emit: ") + e.what();
            if (dynamic_cast<const ConfigError*>(&e) != nullptr) throw ConfigError(msg);
            if (dynamic_cast<const DataError*>(&e) != nullptr) throw DataError(msg);
            if (dynamic_cast<const NumericError*>(&e) != nullptr) throw NumericError(msg);
            throw Error(msg);
        }
    }
    return report;
}

std::vector<CompareRow> compare_feature_sets(const Dataset& d,
                                             const std::vector<std::pair<std::string, TopKMask>>& sets,
                                             const std::vector<ClassifierSpec>& classifiers,
                                             std::size_t folds, std::uint64_t seed,
                                             WarningSink* warnings) {
    if (sets.empty()) throw ConfigError("no feature sets to compare");
    if (classifiers.empty()) throw ConfigError("no classifiers to compare with");
    for (const auto& [name, mask] : sets) {
        if (mask.size() != d.cols())
            throw ConfigError("feature set '" + name + "' width does not match the dataset");
        if (mask.k == 0) throw ConfigError("feature set '" + name + "' is empty");
    }
    for (const auto& c : classifiers) validate_classifier_spec(c);
    const std::vector<std::uint64_t> cls_seeds = keyed_seeds(classifiers, seed, "cv/");
    std::vector<std::string> cls_names;
    for (const auto& c : classifiers) cls_names.push_back(to_string(c.kind));
    cls_names = uniquify(cls_names);

    std::vector<CompareRow> rows;
    for (std::size_t c = 0; c < classifiers.size(); ++c) {
        EvalResult res = cross_validate(classifiers[c], d, folds, cls_seeds[c], warnings);
        rows.push_back({"full", cls_names[c], d.cols(), res.auc});
    }
    for (const auto& [name, mask] : sets) {
        for (std::size_t c = 0; c < classifiers.size(); ++c) {
            EvalResult res = evaluate_subset(classifiers[c], d, mask, folds, cls_seeds[c], warnings);
            rows.push_back({name, cls_names[c], mask.k, res.auc});
        }
    }
    return rows;
}

TopKMask mask_intersection(const TopKMask& a, const TopKMask& b) {
    if (a.size() != b.size()) throw ConfigError("feature sets cover different feature counts");
    TopKMask out;
    out.included.resize(a.size(), 0);
    out.k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.included[i] = (a.included[i] != 0 && b.included[i] != 0) ? 1 : 0;
        out.k += out.included[i];
    }
    return out;
}

}  // namespace rankstab
