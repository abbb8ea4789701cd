#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "rankstab/classifiers.hpp"
#include "rankstab/ingest.hpp"
#include "rankstab/mds.hpp"
#include "rankstab/pipeline.hpp"
#include "rankstab/rankers.hpp"
#include "rankstab/report.hpp"
#include "rankstab/stability.hpp"
#include "rankstab/types.hpp"

namespace py = pybind11;
using namespace rankstab;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                     std::vector<std::string> names) {
    const std::size_t m = rows.size();
    const std::size_t p = m == 0 ? 0 : rows.front().size();
    if (names.empty()) {
        names.resize(p);
        for (std::size_t j = 0; j < p; ++j) names[j] = "x" + std::to_string(j + 1);
    }
    std::vector<double> flat;
    flat.reserve(m * p);
    for (const auto& row : rows) {
        if (row.size() != p) throw DataError("ragged feature matrix");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return Dataset(std::move(names), std::move(flat), labels);
}

RankerSpec make_ranker_spec(const std::string& kind, const std::map<std::string, double>& hp) {
    RankerSpec spec;
    spec.kind = ranker_kind_from_string(kind);
    spec.hyperparameters = hp;
    validate_ranker_spec(spec);
    return spec;
}

ClassifierSpec make_classifier_spec(const std::string& kind,
                                    const std::map<std::string, double>& hp) {
    ClassifierSpec spec;
    spec.kind = classifier_kind_from_string(kind);
    spec.hyperparameters = hp;
    validate_classifier_spec(spec);
    return spec;
}

StabilityMetric metric_from_name(std::string name) {
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (name == "spearman") return StabilityMetric::Spearman;
    if (name == "jaccard") return StabilityMetric::Jaccard;
    if (name == "kuncheva") return StabilityMetric::Kuncheva;
    throw ConfigError("unknown stability metric: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "feature ranking stability and predictive performance toolkit";

    auto base = py::register_exception<Error>(m, "RankstabError");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&make_dataset), py::arg("rows"), py::arg("labels"),
             py::arg("feature_names") = std::vector<std::string>{})
        .def_property_readonly("rows", &Dataset::rows)
        .def_property_readonly("cols", &Dataset::cols)
        .def_property_readonly("positives", &Dataset::positives)
        .def_property_readonly("labels",
                               [](const Dataset& d) { return d.labels(); })
        .def_property_readonly("feature_names",
                               [](const Dataset& d) { return d.feature_names(); })
        .def("column", &Dataset::column, py::arg("j"))
        .def("row",
             [](const Dataset& d, std::size_t i) {
                 if (i >= d.rows()) throw DataError("row index out of range");
                 std::vector<double> out(d.cols());
                 for (std::size_t j = 0; j < d.cols(); ++j) out[j] = d.at(i, j);
                 return out;
             },
             py::arg("i"))
        .def("select_rows", &Dataset::select_rows, py::arg("indices"))
        .def("select_features", &Dataset::select_features, py::arg("mask"));

    py::class_<RankingVector>(m, "RankingVector")
        .def(py::init([](std::vector<double> ranks) { return RankingVector{std::move(ranks)}; }),
             py::arg("ranks"))
        .def_readonly("ranks", &RankingVector::ranks)
        .def("__len__", &RankingVector::size)
        .def("is_permutation", &RankingVector::is_permutation);

    py::class_<TopKMask>(m, "TopKMask")
        .def_readonly("k", &TopKMask::k)
        .def("__len__", &TopKMask::size)
        .def_property_readonly("indices", &TopKMask::indices);

    py::class_<RankingEnsemble>(m, "RankingEnsemble")
        .def_readonly("ranker_name", &RankingEnsemble::ranker_name)
        .def_readonly("rankings", &RankingEnsemble::rankings)
        .def_readonly("seeds", &RankingEnsemble::seeds)
        .def_property_readonly("runs", &RankingEnsemble::runs)
        .def_property_readonly("features", &RankingEnsemble::features);

    py::class_<StabilityScore>(m, "StabilityScore")
        .def_property_readonly("metric",
                               [](const StabilityScore& s) { return to_string(s.metric); })
        .def_readonly("value", &StabilityScore::value)
        .def_readonly("k", &StabilityScore::k)
        .def_readonly("runs", &StabilityScore::runs)
        .def_readonly("pairwise", &StabilityScore::pairwise);

    py::class_<JaccardProfile>(m, "JaccardProfile")
        .def_readonly("points", &JaccardProfile::points)
        .def_readonly("mean_over_all_k", &JaccardProfile::mean_over_all_k);

    py::class_<EvalResult>(m, "EvalResult")
        .def_readonly("auc", &EvalResult::auc)
        .def_readonly("accuracy", &EvalResult::accuracy)
        .def_readonly("fold_aucs", &EvalResult::fold_aucs)
        .def_readonly("fold_accuracies", &EvalResult::fold_accuracies)
        .def_readonly("seed", &EvalResult::seed);

    py::class_<DissimilarityMatrix>(m, "DissimilarityMatrix")
        .def_readonly("n", &DissimilarityMatrix::n)
        .def_readonly("values", &DissimilarityMatrix::values)
        .def_readonly("labels", &DissimilarityMatrix::labels)
        .def("at", &DissimilarityMatrix::at, py::arg("i"), py::arg("j"));

    py::class_<Embedding>(m, "Embedding")
        .def_readonly("coordinates", &Embedding::coordinates)
        .def_readonly("stress", &Embedding::stress)
        .def_readonly("iterations", &Embedding::iterations)
        .def_readonly("converged", &Embedding::converged)
        .def_readonly("stress_history", &Embedding::stress_history)
        .def_readonly("labels", &Embedding::labels)
        .def("x", &Embedding::x, py::arg("i"))
        .def("y", &Embedding::y, py::arg("i"));

    py::class_<TrainedModel>(m, "TrainedModel")
        .def_property_readonly("converged", &TrainedModel::converged)
        .def_property_readonly("decision_threshold", &TrainedModel::decision_threshold)
        .def("score", [](const TrainedModel& t, const Dataset& d) { return t.score(d); },
             py::arg("dataset"))
        .def("score_rows",
             [](const TrainedModel& t, const std::vector<std::vector<double>>& rows) {
                 const std::size_t p = rows.empty() ? 0 : rows.front().size();
                 std::vector<double> flat;
                 flat.reserve(rows.size() * p);
                 for (const auto& row : rows) {
                     if (row.size() != p) throw DataError("ragged score matrix");
                     flat.insert(flat.end(), row.begin(), row.end());
                 }
                 return t.score(MatrixView{flat.data(), rows.size(), p});
             },
             py::arg("rows"));

    // data plumbing
    m.def(
        "generate_synthetic",
        [](std::size_t n_instances, std::size_t n_informative, std::size_t n_noise,
           std::size_t n_redundant, std::vector<double> coefficients, double snp_fraction,
           double prevalence, std::uint64_t seed) {
            SyntheticSpec spec;
            spec.n_instances = n_instances;
            spec.n_informative = n_informative;
            spec.n_noise = n_noise;
            spec.n_redundant = n_redundant;
            spec.coefficients = coefficients.empty()
                                    ? std::vector<double>(n_informative, 1.5)
                                    : std::move(coefficients);
            spec.snp_fraction = snp_fraction;
            spec.prevalence = prevalence;
            spec.seed = seed;
            SyntheticResult res = generate_synthetic(spec);
            return py::make_tuple(res.dataset, res.informative_indices);
        },
        py::arg("n_instances"), py::arg("n_informative"), py::arg("n_noise") = 0,
        py::arg("n_redundant") = 0, py::arg("coefficients") = std::vector<double>{},
        py::arg("snp_fraction") = 0.0, py::arg("prevalence") = 1.0 / 3.0, py::arg("seed") = 0);
    m.def(
        "load_csv",
        [](const std::string& path, const std::string& label_column,
           const std::string& positive_label) {
            CsvSchema schema;
            schema.label_column = label_column;
            schema.positive_label = positive_label;
            LoadResult res = load_csv(path, schema);
            return py::make_tuple(res.dataset, res.dropped_rows);
        },
        py::arg("path"), py::arg("label_column") = "label", py::arg("positive_label") = "1");
    m.def("write_csv", &write_csv, py::arg("dataset"), py::arg("path"),
          py::arg("label_column") = "label");
    m.def("standardize", [](const Dataset& d) { return standardize(d).first; },
          py::arg("dataset"));
    m.def("subsample", &subsample, py::arg("dataset"), py::arg("fraction"), py::arg("seed"),
          py::arg("max_retries") = 100);

    // ranking
    m.def(
        "rank",
        [](const std::string& ranker, const Dataset& d, std::uint64_t seed,
           const std::map<std::string, double>& hyperparameters) {
            return rank(make_ranker_spec(ranker, hyperparameters), d, seed, nullptr);
        },
        py::arg("ranker"), py::arg("dataset"), py::arg("seed") = 0,
        py::arg("hyperparameters") = std::map<std::string, double>{});
    m.def(
        "run_ensemble",
        [](const std::string& ranker, const Dataset& d, std::size_t runs, double fraction,
           std::uint64_t seed, unsigned threads,
           const std::map<std::string, double>& hyperparameters) {
            return run_ensemble(make_ranker_spec(ranker, hyperparameters), d, runs, fraction,
                                seed, threads, nullptr);
        },
        py::arg("ranker"), py::arg("dataset"), py::arg("runs") = 7, py::arg("fraction") = 0.7,
        py::arg("seed") = 0, py::arg("threads") = 1,
        py::arg("hyperparameters") = std::map<std::string, double>{});
    m.def("aggregate_median", &aggregate_median, py::arg("ensemble"));
    m.def("to_top_k", &to_top_k, py::arg("ranking"), py::arg("k"));
    m.def("mask_from_indices", &mask_from_indices, py::arg("p"), py::arg("indices"));

    // stability
    m.def("spearman", &spearman, py::arg("a"), py::arg("b"));
    m.def("jaccard", &jaccard, py::arg("a"), py::arg("b"));
    m.def("kuncheva", &kuncheva, py::arg("a"), py::arg("b"));
    m.def(
        "ensemble_stability",
        [](const RankingEnsemble& e, const std::string& metric, std::size_t k) {
            return ensemble_stability(e, metric_from_name(metric), k);
        },
        py::arg("ensemble"), py::arg("metric") = "spearman", py::arg("k") = 0);
    m.def("jaccard_profile", &jaccard_profile, py::arg("ensemble"), py::arg("ks"));

    // mds
    m.def("rank_dissimilarity", &rank_dissimilarity, py::arg("ensembles"));
    m.def("embed", &embed, py::arg("dissimilarity"), py::arg("seed") = 0);
    m.def("dispersion",
          [](const Embedding& e) {
              WarningSink sink;
              return dispersion(e, &sink);
          },
          py::arg("embedding"));

    // classification
    m.def(
        "train",
        [](const std::string& classifier, const Dataset& d, std::uint64_t seed,
           const std::map<std::string, double>& hyperparameters) {
            return train(make_classifier_spec(classifier, hyperparameters), d, seed, nullptr);
        },
        py::arg("classifier"), py::arg("dataset"), py::arg("seed") = 0,
        py::arg("hyperparameters") = std::map<std::string, double>{});
    m.def("auc", &auc, py::arg("scores"), py::arg("labels"));
    m.def("accuracy", &accuracy, py::arg("scores"), py::arg("labels"), py::arg("threshold"));
    m.def(
        "cross_validate",
        [](const std::string& classifier, const Dataset& d, std::size_t folds,
           std::uint64_t seed, const std::map<std::string, double>& hyperparameters) {
            return cross_validate(make_classifier_spec(classifier, hyperparameters), d, folds,
                                  seed, nullptr);
        },
        py::arg("classifier"), py::arg("dataset"), py::arg("folds") = 5, py::arg("seed") = 0,
        py::arg("hyperparameters") = std::map<std::string, double>{});
    m.def(
        "evaluate_subset",
        [](const std::string& classifier, const Dataset& d, const TopKMask& mask,
           std::size_t folds, std::uint64_t seed,
           const std::map<std::string, double>& hyperparameters) {
            return evaluate_subset(make_classifier_spec(classifier, hyperparameters), d, mask,
                                   folds, seed, nullptr);
        },
        py::arg("classifier"), py::arg("dataset"), py::arg("mask"), py::arg("folds") = 5,
        py::arg("seed") = 0, py::arg("hyperparameters") = std::map<std::string, double>{});

    // pipeline and serialization
    m.def(
        "run_pipeline_json",
        [](const std::string& config_json, const Dataset& d, const std::string& output_dir,
           unsigned threads) {
            PipelineConfig cfg = pipeline_config_from_json(config_json);
            cfg.output_dir = output_dir;
            cfg.threads = threads;
            return report_to_json(run_pipeline(cfg, d));
        },
        py::arg("config_json"), py::arg("dataset"), py::arg("output_dir") = "",
        py::arg("threads") = 1);
    m.def("ensemble_to_json", &ensemble_to_json, py::arg("ensemble"));
    m.def("ensemble_from_json", &ensemble_from_json, py::arg("text"));
    m.def("stability_score_to_json", &stability_score_to_json, py::arg("score"));
}
