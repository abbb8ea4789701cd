#include <cctype>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rankstab/classifiers.hpp"
#include "rankstab/ingest.hpp"
#include "rankstab/mds.hpp"
#include "rankstab/pipeline.hpp"
#include "rankstab/rankers.hpp"
#include "rankstab/report.hpp"
#include "rankstab/stability.hpp"
#include "rankstab/types.hpp"

using namespace rankstab;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& s, const char* what) {
    std::vector<std::size_t> out;
    for (const std::string& tok : split(s, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(tok, &pos);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": bad integer '" + tok + "'");
        }
        if (pos != tok.size()) throw ConfigError(std::string(what) + ": bad integer '" + tok + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

StabilityMetric parse_metric(std::string name) {
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (name == "spearman") return StabilityMetric::Spearman;
    if (name == "jaccard") return StabilityMetric::Jaccard;
    if (name == "kuncheva") return StabilityMetric::Kuncheva;
    throw ConfigError("unknown stability metric: " + name);
}

void print_warnings(const WarningSink& sink) {
    for (const auto& msg : sink.messages()) std::cerr << "warning: " << msg << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature ranking stability and predictive performance toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out;
    std::string config;
    unsigned threads = 0;
    std::string label_column = "label";
    std::string positive_label = "1";
    std::string missing_tokens;

    auto* seed_opt = app.add_option("--seed", seed, "master random seed (default 0)");
    app.add_option("--out", out, "output file or directory");
    app.add_option("--config", config, "JSON configuration file");
    app.add_option("--threads", threads, "worker threads, 0 = all cores (results are identical)");
    app.add_option("--label", label_column, "CSV label column name (default 'label')");
    app.add_option("--positive-label", positive_label, "label token mapped to class 1 (default '1')");
    auto* missing_opt =
        app.add_option("--missing", missing_tokens,
                       "comma separated missing-value tokens (default: empty string and NA)");

    auto make_schema = [&]() {
        CsvSchema schema;
        schema.label_column = label_column;
        schema.positive_label = positive_label;
        if (missing_opt->count() > 0) {
            schema.missing_tokens.clear();
            for (const std::string& tok : split(missing_tokens, ','))
                schema.missing_tokens.insert(tok);
        }
        return schema;
    };
    auto load = [&](const std::string& path) {
        LoadResult res = load_csv(path, make_schema());
        if (res.dropped_rows > 0)
            std::cerr << "note: dropped " << res.dropped_rows << " rows with missing values\n";
        return res.dataset;
    };
    auto deliver = [&](const std::string& content) {
        if (out.empty()) {
            std::cout << content;
        } else {
            write_text_file(out, content);
        }
    };

    // synth: synthetic spec JSON -> case-control CSV
    auto* synth = app.add_subcommand("synth", "generate a synthetic case-control CSV");
    synth->fallthrough();
    synth->callback([&]() {
        if (config.empty()) throw ConfigError("synth needs --config with a synthetic spec JSON");
        SyntheticSpec spec = synthetic_spec_from_json(read_text_file(config));
        if (seed_opt->count() > 0) spec.seed = seed;
        SyntheticResult res = generate_synthetic(spec);
        const std::string path = out.empty() ? "synthetic.csv" : out;
        write_csv(res.dataset, path, label_column);
        ordered_json j;
        j["path"] = path;
        j["rows"] = res.dataset.rows();
        j["features"] = res.dataset.cols();
        j["positives"] = res.dataset.positives();
        j["informative_indices"] = res.informative_indices;
        std::cout << j.dump(2) << "\n";
    });

    // rank: dataset -> ranking ensemble JSON
    auto* rank_cmd = app.add_subcommand("rank", "run one feature ranker on a CSV dataset");
    rank_cmd->fallthrough();
    std::string rank_data;
    std::string rank_kind;
    std::size_t rank_runs = 1;
    double rank_fraction = 0.7;
    rank_cmd->add_option("data", rank_data, "case-control CSV")->required();
    rank_cmd->add_option("--ranker", rank_kind,
                         "ranker kind (Pearson, Relief, SvmWrapper, NnWrapper, SvmRfe, "
                         "RandomForest); overrides --config");
    rank_cmd->add_option("--runs", rank_runs, "rankings to produce (>= 2 subsamples the data)");
    rank_cmd->add_option("--fraction", rank_fraction, "subsample fraction when --runs >= 2");
    rank_cmd->callback([&]() {
        RankerSpec spec;
        if (!config.empty()) spec = ranker_spec_from_json(read_text_file(config));
        if (!rank_kind.empty()) spec.kind = ranker_kind_from_string(rank_kind);
        validate_ranker_spec(spec);
        Dataset d = load(rank_data);
        WarningSink sink;
        RankingEnsemble ensemble;
        if (rank_runs >= 2) {
            ensemble = run_ensemble(spec, d, rank_runs, rank_fraction, seed, threads, &sink);
        } else {
            ensemble.ranker_name = to_string(spec.kind);
            ensemble.rankings.push_back(rank(spec, d, seed, &sink));
            ensemble.seeds.push_back(seed);
        }
        deliver(ensemble_to_json(ensemble));
        print_warnings(sink);
    });

    // stability: ensemble JSON -> metric JSON or Jaccard profile CSV
    auto* stab = app.add_subcommand("stability", "score an ensemble's stability");
    stab->fallthrough();
    std::string stab_input;
    std::string stab_metric = "spearman";
    std::size_t stab_k = 0;
    std::string stab_profile;
    stab->add_option("ensemble", stab_input, "ensemble JSON file")->required();
    stab->add_option("--metric", stab_metric, "spearman, jaccard, or kuncheva");
    stab->add_option("-k,--k", stab_k, "top-k cutoff for the set based metrics");
    stab->add_option("--profile-grid", stab_profile,
                     "comma separated k values; emits a Jaccard profile CSV instead");
    stab->callback([&]() {
        RankingEnsemble ensemble = ensemble_from_json(read_text_file(stab_input));
        if (!stab_profile.empty()) {
            JaccardProfile profile =
                jaccard_profile(ensemble, parse_size_list(stab_profile, "--profile-grid"));
            deliver(jaccard_profile_csv(profile));
            return;
        }
        StabilityScore score = ensemble_stability(ensemble, parse_metric(stab_metric), stab_k);
        deliver(stability_score_to_json(score));
    });

    // mds: ensembles JSON -> coordinates + plot
    auto* mds_cmd = app.add_subcommand("mds", "embed ranking runs into 2D");
    mds_cmd->fallthrough();
    std::string mds_input;
    mds_cmd->add_option("ensembles", mds_input, "JSON array of ensembles")->required();
    mds_cmd->callback([&]() {
        std::vector<RankingEnsemble> ensembles = ensembles_from_json(read_text_file(mds_input));
        DissimilarityMatrix dis = rank_dissimilarity(ensembles);
        Embedding emb = embed(dis, seed);
        WarningSink sink;
        std::map<std::string, double> disp = dispersion(emb, &sink);
        const std::string dir = out.empty() ? "." : out;
        std::filesystem::create_directories(dir);
        write_text_file(dir + "/mds_coords.csv", embedding_csv(emb));
        write_text_file(dir + "/mds_plot.svg", embedding_svg(emb));
        ordered_json j;
        j["stress"] = emb.stress;
        j["iterations"] = emb.iterations;
        j["converged"] = emb.converged;
        ordered_json dj = ordered_json::array();
        for (const auto& [name, value] : disp) {
            ordered_json e;
            e["ranker"] = name;
            e["value"] = value;
            dj.push_back(e);
        }
        j["dispersion"] = dj;
        write_text_file(dir + "/mds_stress.json", j.dump(2) + "\n");
        std::cout << "wrote mds_coords.csv, mds_plot.svg, mds_stress.json to " << dir << "\n";
        print_warnings(sink);
    });

    // curve: ranking + dataset -> AUC vs k CSV
    auto* curve_cmd = app.add_subcommand("curve", "AUC over top-k subsets of a ranking");
    curve_cmd->fallthrough();
    std::string curve_data;
    std::string curve_ranking;
    std::string curve_classifier = "LR";
    std::string curve_grid;
    std::string curve_svg_path;
    std::size_t curve_folds = 5;
    curve_cmd->add_option("data", curve_data, "case-control CSV")->required();
    curve_cmd->add_option("--ranking", curve_ranking, "ranking or ensemble JSON (ensembles are median aggregated)")
        ->required();
    curve_cmd->add_option("--classifier", curve_classifier, "LR, KNN, SVM, BT, or NN; overrides --config");
    curve_cmd->add_option("--grid", curve_grid, "comma separated k values (default 1..p)");
    curve_cmd->add_option("--svg", curve_svg_path, "also write a line chart SVG here");
    curve_cmd->add_option("--folds", curve_folds, "cross validation folds (default 5)");
    curve_cmd->callback([&]() {
        Dataset d = load(curve_data);
        RankingEnsemble ensemble = ensemble_from_json(read_text_file(curve_ranking));
        if (ensemble.features() != d.cols())
            throw DataError("ranking covers a different feature count than the dataset");
        RankingVector agg =
            ensemble.runs() == 1 ? ensemble.rankings.front() : aggregate_median(ensemble);
        ClassifierSpec spec;
        if (!config.empty()) spec = classifier_spec_from_json(read_text_file(config));
        if (!curve_classifier.empty()) spec.kind = classifier_kind_from_string(curve_classifier);
        validate_classifier_spec(spec);
        std::vector<std::size_t> grid;
        if (curve_grid.empty()) {
            grid.resize(d.cols());
            std::iota(grid.begin(), grid.end(), std::size_t{1});
        } else {
            grid = parse_size_list(curve_grid, "--grid");
        }
        WarningSink sink;
        const std::uint64_t cv_seed = derive_seed(seed, "cv/" + to_string(spec.kind), 0);
        CurveResult result;
        result.ranker_name = ensemble.ranker_name;
        result.classifier_name = to_string(spec.kind);
        result.baseline_auc = cross_validate(spec, d, curve_folds, cv_seed, &sink).auc;
        for (std::size_t k : grid) {
            EvalResult res =
                evaluate_subset(spec, d, to_top_k(agg, k), curve_folds, cv_seed, &sink);
            result.points.push_back({k, res.auc});
        }
        deliver(curve_csv(result));
        if (!curve_svg_path.empty()) write_text_file(curve_svg_path, curve_svg(result));
        print_warnings(sink);
    });

    // pipeline: full study
    auto* pipe = app.add_subcommand("pipeline", "run the full ranking stability study");
    pipe->fallthrough();
    std::string pipe_data;
    pipe->add_option("data", pipe_data, "case-control CSV")->required();
    pipe->callback([&]() {
        PipelineConfig cfg;
        if (!config.empty()) {
            cfg = pipeline_config_from_json(read_text_file(config));
        } else {
            cfg.rankers = default_ranker_suite();
            cfg.classifiers = default_classifier_suite();
        }
        if (seed_opt->count() > 0) cfg.master_seed = seed;
        cfg.output_dir = out.empty() ? "rankstab_out" : out;
        cfg.threads = threads;
        Dataset d = load(pipe_data);
        StabilityReport report = run_pipeline(cfg, d);
        std::cout << "report written to " << cfg.output_dir << " (" << report.ensembles.size()
                  << " rankers, " << report.baselines.size() << " classifiers, "
                  << report.config.curve_grid.size() << " curve points each)\n";
        for (const auto& msg : report.warnings) std::cerr << "warning: " << msg << "\n";
    });

    // compare: named feature sets -> AUC table
    auto* cmp = app.add_subcommand("compare", "evaluate named feature sets against the full set");
    cmp->fallthrough();
    std::string cmp_data;
    std::size_t cmp_folds = 5;
    cmp->add_option("data", cmp_data, "case-control CSV")->required();
    cmp->add_option("--folds", cmp_folds, "cross validation folds (default 5)");
    cmp->callback([&]() {
        if (config.empty())
            throw ConfigError("compare needs --config with sets to evaluate");
        Dataset d = load(cmp_data);
        ordered_json doc = ordered_json::parse(read_text_file(config), nullptr, false);
        if (doc.is_discarded()) throw ConfigError("malformed JSON document");
        std::vector<std::pair<std::string, TopKMask>> sets;
        if (!doc.contains("sets") || !doc["sets"].is_array())
            throw ConfigError("compare config needs a 'sets' array");
        for (const auto& sj : doc["sets"]) {
            if (!sj.contains("name") || !sj["name"].is_string())
                throw ConfigError("each set needs a string 'name'");
            if (!sj.contains("indices") || !sj["indices"].is_array())
                throw ConfigError("each set needs an 'indices' array of 0-based feature indices");
            std::vector<std::size_t> idx;
            for (const auto& v : sj["indices"]) {
                if (!v.is_number_integer() && !v.is_number_unsigned())
                    throw ConfigError("set indices must be integers");
                idx.push_back(v.get<std::size_t>());
            }
            sets.emplace_back(sj["name"].get<std::string>(), mask_from_indices(d.cols(), idx));
        }
        if (doc.contains("intersections")) {
            if (!doc["intersections"].is_array())
                throw ConfigError("'intersections' must be an array of name pairs");
            const std::size_t given = sets.size();
            for (const auto& pair : doc["intersections"]) {
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
                    !pair[1].is_string())
                    throw ConfigError("each intersection must be a pair of set names");
                const std::string a = pair[0].get<std::string>();
                const std::string b = pair[1].get<std::string>();
                const TopKMask* ma = nullptr;
                const TopKMask* mb = nullptr;
                for (std::size_t i = 0; i < given; ++i) {
                    if (sets[i].first == a) ma = &sets[i].second;
                    if (sets[i].first == b) mb = &sets[i].second;
                }
                if (ma == nullptr || mb == nullptr)
                    throw ConfigError("intersection refers to an unknown set name");
                sets.emplace_back(a + "&" + b, mask_intersection(*ma, *mb));
            }
        }
        std::vector<ClassifierSpec> classifiers;
        if (doc.contains("classifiers")) {
            if (!doc["classifiers"].is_array())
                throw ConfigError("'classifiers' must be an array");
            for (const auto& cj : doc["classifiers"])
                classifiers.push_back(classifier_spec_from_json(cj.dump()));
        } else {
            classifiers = default_classifier_suite();
        }
        std::size_t folds = cmp_folds;
        if (doc.contains("folds")) {
            if (!doc["folds"].is_number_unsigned())
                throw ConfigError("'folds' must be a non-negative integer");
            folds = doc["folds"].get<std::size_t>();
        }
        WarningSink sink;
        std::vector<CompareRow> rows = compare_feature_sets(d, sets, classifiers, folds, seed, &sink);
        deliver(compare_table_csv(rows));
        print_warnings(sink);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
