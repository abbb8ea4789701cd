#include "rankstab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rankstab {

using json = nlohmann::ordered_json;

std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

// fixed two-decimal form for SVG geometry
std::string fmt_px(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

// short display label for plot annotations
std::string fmt_sig(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

json parse_doc(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("malformed JSON document");
    return doc;
}

const json& field(const json& doc, const char* name) {
    if (!doc.is_object()) throw ConfigError("expected a JSON object");
    auto it = doc.find(name);
    if (it == doc.end()) throw ConfigError(std::string("missing JSON field: ") + name);
    return *it;
}

const json* opt_field(const json& doc, const char* name) {
    if (!doc.is_object()) return nullptr;
    auto it = doc.find(name);
    return it == doc.end() ? nullptr : &*it;
}

std::string as_string(const json& v, const char* what) {
    if (!v.is_string()) throw ConfigError(std::string(what) + " must be a string");
    return v.get<std::string>();
}

double as_double(const json& v, const char* what) {
    if (!v.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return v.get<double>();
}

std::uint64_t as_u64(const json& v, const char* what) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(std::string(what) + " must be a non-negative integer");
}

std::size_t as_size(const json& v, const char* what) {
    return static_cast<std::size_t>(as_u64(v, what));
}

bool as_bool(const json& v, const char* what) {
    if (!v.is_boolean()) throw ConfigError(std::string(what) + " must be a boolean");
    return v.get<bool>();
}

const json& as_array(const json& v, const char* what) {
    if (!v.is_array()) throw ConfigError(std::string(what) + " must be an array");
    return v;
}

std::vector<double> double_vector(const json& v, const char* what) {
    std::vector<double> out;
    for (const auto& e : as_array(v, what)) out.push_back(as_double(e, what));
    return out;
}

std::vector<std::size_t> size_vector(const json& v, const char* what) {
    std::vector<std::size_t> out;
    for (const auto& e : as_array(v, what)) out.push_back(as_size(e, what));
    return out;
}

std::vector<std::uint64_t> u64_vector(const json& v, const char* what) {
    std::vector<std::uint64_t> out;
    for (const auto& e : as_array(v, what)) out.push_back(as_u64(e, what));
    return out;
}

std::vector<std::string> string_vector(const json& v, const char* what) {
    std::vector<std::string> out;
    for (const auto& e : as_array(v, what)) out.push_back(as_string(e, what));
    return out;
}

json hyper_json(const std::map<std::string, double>& h) {
    json j = json::object();
    for (const auto& [name, value] : h) j[name] = value;
    return j;
}

std::map<std::string, double> hyper_from(const json* v) {
    std::map<std::string, double> out;
    if (!v) return out;
    if (!v->is_object()) throw ConfigError("hyperparameters must be an object");
    for (auto it = v->begin(); it != v->end(); ++it)
        out[it.key()] = as_double(it.value(), it.key().c_str());
    return out;
}

json classifier_spec_doc(const ClassifierSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    j["hyperparameters"] = hyper_json(spec.hyperparameters);
    return j;
}

ClassifierSpec classifier_spec_from_doc(const json& doc) {
    ClassifierSpec spec;
    spec.kind = classifier_kind_from_string(as_string(field(doc, "kind"), "kind"));
    spec.hyperparameters = hyper_from(opt_field(doc, "hyperparameters"));
    validate_classifier_spec(spec);
    return spec;
}

json ranker_spec_doc(const RankerSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    j["hyperparameters"] = hyper_json(spec.hyperparameters);
    return j;
}

RankerSpec ranker_spec_from_doc(const json& doc) {
    RankerSpec spec;
    spec.kind = ranker_kind_from_string(as_string(field(doc, "kind"), "kind"));
    spec.hyperparameters = hyper_from(opt_field(doc, "hyperparameters"));
    validate_ranker_spec(spec);
    return spec;
}

json ensemble_doc(const RankingEnsemble& e) {
    json j;
    j["ranker"] = e.ranker_name;
    j["seeds"] = e.seeds;
    json rk = json::array();
    for (const auto& r : e.rankings) rk.push_back(r.ranks);
    j["rankings"] = rk;
    return j;
}

// single-run documents are accepted here; operations that need K >= 2
// enforce that themselves
RankingEnsemble ensemble_from_doc(const json& doc) {
    RankingEnsemble e;
    e.ranker_name = as_string(field(doc, "ranker"), "ranker");
    e.seeds = u64_vector(field(doc, "seeds"), "seeds");
    for (const auto& row : as_array(field(doc, "rankings"), "rankings"))
        e.rankings.push_back(RankingVector{double_vector(row, "ranking")});
    if (e.rankings.empty()) throw DataError("ensemble holds no rankings");
    const std::size_t p = e.rankings.front().size();
    for (const auto& r : e.rankings) {
        if (r.size() != p) throw DataError("ensemble rankings differ in feature count");
        validate_ranking(r);
    }
    if (e.seeds.size() != e.rankings.size()) throw DataError("ensemble seed count mismatch");
    return e;
}

json eval_doc(const EvalResult& r) {
    json j;
    j["auc"] = r.auc;
    j["accuracy"] = r.accuracy;
    j["fold_aucs"] = r.fold_aucs;
    j["fold_accuracies"] = r.fold_accuracies;
    j["seed"] = r.seed;
    return j;
}

EvalResult eval_from_doc(const json& doc) {
    EvalResult r;
    r.auc = as_double(field(doc, "auc"), "auc");
    r.accuracy = as_double(field(doc, "accuracy"), "accuracy");
    r.fold_aucs = double_vector(field(doc, "fold_aucs"), "fold_aucs");
    r.fold_accuracies = double_vector(field(doc, "fold_accuracies"), "fold_accuracies");
    r.seed = as_u64(field(doc, "seed"), "seed");
    return r;
}

json score_doc(const StabilityScore& s) {
    json j;
    j["metric"] = to_string(s.metric);
    j["k"] = s.k;
    j["value"] = s.value;
    json pw = json::array();
    for (std::size_t i = 0; i < s.runs; ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < s.runs; ++c) row.push_back(s.pairwise[i * s.runs + c]);
        pw.push_back(std::move(row));
    }
    j["pairwise"] = pw;
    return j;
}

StabilityScore score_from_doc(const json& doc) {
    StabilityScore s;
    s.metric = stability_metric_from_string(as_string(field(doc, "metric"), "metric"));
    s.k = as_size(field(doc, "k"), "k");
    s.value = as_double(field(doc, "value"), "value");
    const json& pw = as_array(field(doc, "pairwise"), "pairwise");
    s.runs = pw.size();
    for (const auto& row : pw) {
        const json& r = as_array(row, "pairwise row");
        if (r.size() != s.runs) throw ConfigError("pairwise matrix must be square");
        for (const auto& v : r) s.pairwise.push_back(as_double(v, "pairwise value"));
    }
    return s;
}

json config_doc(const PipelineConfig& cfg) {
    json j;
    json rks = json::array();
    for (const auto& r : cfg.rankers) rks.push_back(ranker_spec_doc(r));
    j["rankers"] = rks;
    json cls = json::array();
    for (const auto& c : cfg.classifiers) cls.push_back(classifier_spec_doc(c));
    j["classifiers"] = cls;
    j["runs"] = cfg.runs;
    j["fraction"] = cfg.fraction;
    j["folds"] = cfg.folds;
    j["curve_grid"] = cfg.curve_grid;
    j["jaccard_grid"] = cfg.jaccard_grid;
    j["caps"] = cfg.caps;
    j["master_seed"] = cfg.master_seed;
    return j;
}

// output_dir and threads are runtime knobs, never part of the wire format
PipelineConfig config_from_doc(const json& doc) {
    PipelineConfig cfg;
    if (const json* v = opt_field(doc, "rankers")) {
        for (const auto& e : as_array(*v, "rankers")) cfg.rankers.push_back(ranker_spec_from_doc(e));
    } else {
        cfg.rankers = default_ranker_suite();
    }
    if (const json* v = opt_field(doc, "classifiers")) {
        for (const auto& e : as_array(*v, "classifiers"))
            cfg.classifiers.push_back(classifier_spec_from_doc(e));
    } else {
        cfg.classifiers = default_classifier_suite();
    }
    if (const json* v = opt_field(doc, "runs")) cfg.runs = as_size(*v, "runs");
    if (const json* v = opt_field(doc, "fraction")) cfg.fraction = as_double(*v, "fraction");
    if (const json* v = opt_field(doc, "folds")) cfg.folds = as_size(*v, "folds");
    if (const json* v = opt_field(doc, "curve_grid")) cfg.curve_grid = size_vector(*v, "curve_grid");
    if (const json* v = opt_field(doc, "jaccard_grid"))
        cfg.jaccard_grid = size_vector(*v, "jaccard_grid");
    if (const json* v = opt_field(doc, "caps")) cfg.caps = size_vector(*v, "caps");
    if (const json* v = opt_field(doc, "master_seed")) cfg.master_seed = as_u64(*v, "master_seed");
    return cfg;
}

json report_doc(const StabilityReport& r) {
    json j;
    j["schema"] = "rankstab-report-v1";
    json ds;
    ds["rows"] = r.rows;
    ds["features"] = r.features;
    ds["positives"] = r.positives;
    ds["feature_names"] = r.feature_names;
    j["dataset"] = ds;
    j["config"] = config_doc(r.config);
    j["warnings"] = r.warnings;

    json bl = json::array();
    for (const auto& [name, res] : r.baselines) {
        json b;
        b["classifier"] = name;
        json e = eval_doc(res);
        for (auto it = e.begin(); it != e.end(); ++it) b[it.key()] = it.value();
        bl.push_back(std::move(b));
    }
    j["baselines"] = bl;

    json es = json::array();
    for (const auto& e : r.ensembles) es.push_back(ensemble_doc(e));
    j["ensembles"] = es;

    json ag = json::array();
    for (std::size_t i = 0; i < r.aggregated.size(); ++i) {
        json a;
        a["ranker"] = i < r.ensembles.size() ? r.ensembles[i].ranker_name : std::string();
        a["ranks"] = r.aggregated[i].ranks;
        ag.push_back(std::move(a));
    }
    j["aggregated"] = ag;

    json cv = json::array();
    for (const auto& c : r.curves) {
        json cj;
        cj["ranker"] = c.ranker_name;
        cj["classifier"] = c.classifier_name;
        cj["baseline_auc"] = c.baseline_auc;
        json pts = json::array();
        for (const auto& pt : c.points) {
            json pj;
            pj["k"] = pt.k;
            pj["auc"] = pt.auc;
            pts.push_back(std::move(pj));
        }
        cj["points"] = pts;
        cv.push_back(std::move(cj));
    }
    j["curves"] = cv;

    json bs = json::array();
    for (const auto& row : r.best_subsets) {
        json rj;
        rj["classifier"] = row.classifier_name;
        rj["cap"] = row.cap;
        json entries = json::array();
        for (const auto& e : row.entries) {
            json ej;
            ej["k"] = e.k;
            ej["ranker"] = e.ranker_name;
            ej["auc"] = e.auc;
            entries.push_back(std::move(ej));
        }
        rj["entries"] = entries;
        bs.push_back(std::move(rj));
    }
    j["best_subsets"] = bs;

    json st = json::array();
    for (std::size_t i = 0; i < r.spearman_stability.size(); ++i) {
        json sj;
        sj["ranker"] = i < r.ensembles.size() ? r.ensembles[i].ranker_name : std::string();
        json sc = score_doc(r.spearman_stability[i]);
        for (auto it = sc.begin(); it != sc.end(); ++it) sj[it.key()] = it.value();
        st.push_back(std::move(sj));
    }
    j["spearman_stability"] = st;

    json jp = json::array();
    for (std::size_t i = 0; i < r.jaccard_profiles.size(); ++i) {
        json pj;
        pj["ranker"] = i < r.ensembles.size() ? r.ensembles[i].ranker_name : std::string();
        json pts = json::array();
        for (const auto& [k, value] : r.jaccard_profiles[i].points) {
            json e;
            e["k"] = k;
            e["value"] = value;
            pts.push_back(std::move(e));
        }
        pj["points"] = pts;
        pj["mean_over_all_k"] = r.jaccard_profiles[i].mean_over_all_k;
        jp.push_back(std::move(pj));
    }
    j["jaccard_profiles"] = jp;

    json mds;
    json labels = json::array();
    for (const auto& [ranker, run] : r.dissimilarity.labels) {
        json lj;
        lj["ranker"] = ranker;
        lj["run"] = run;
        labels.push_back(std::move(lj));
    }
    mds["labels"] = labels;
    json dis = json::array();
    for (std::size_t i = 0; i < r.dissimilarity.n; ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < r.dissimilarity.n; ++c)
            row.push_back(r.dissimilarity.at(i, c));
        dis.push_back(std::move(row));
    }
    mds["dissimilarity"] = dis;
    json coords = json::array();
    for (std::size_t i = 0; 2 * i + 1 < r.embedding.coordinates.size(); ++i) {
        json pt = json::array();
        pt.push_back(r.embedding.x(i));
        pt.push_back(r.embedding.y(i));
        coords.push_back(std::move(pt));
    }
    mds["coordinates"] = coords;
    mds["stress"] = r.embedding.stress;
    mds["iterations"] = r.embedding.iterations;
    mds["converged"] = r.embedding.converged;
    mds["stress_history"] = r.embedding.stress_history;
    json disp = json::array();
    for (const auto& [name, value] : r.dispersions) {
        json dj;
        dj["ranker"] = name;
        dj["value"] = value;
        disp.push_back(std::move(dj));
    }
    mds["dispersion"] = disp;
    j["mds"] = mds;
    return j;
}

StabilityReport report_from_doc(const json& doc) {
    StabilityReport r;
    const json& ds = field(doc, "dataset");
    r.rows = as_size(field(ds, "rows"), "rows");
    r.features = as_size(field(ds, "features"), "features");
    r.positives = as_size(field(ds, "positives"), "positives");
    r.feature_names = string_vector(field(ds, "feature_names"), "feature_names");
    r.config = config_from_doc(field(doc, "config"));
    r.warnings = string_vector(field(doc, "warnings"), "warnings");

    for (const auto& b : as_array(field(doc, "baselines"), "baselines"))
        r.baselines.emplace_back(as_string(field(b, "classifier"), "classifier"),
                                 eval_from_doc(b));
    for (const auto& e : as_array(field(doc, "ensembles"), "ensembles"))
        r.ensembles.push_back(ensemble_from_doc(e));
    for (const auto& a : as_array(field(doc, "aggregated"), "aggregated"))
        r.aggregated.push_back(RankingVector{double_vector(field(a, "ranks"), "ranks")});

    for (const auto& c : as_array(field(doc, "curves"), "curves")) {
        CurveResult cr;
        cr.ranker_name = as_string(field(c, "ranker"), "ranker");
        cr.classifier_name = as_string(field(c, "classifier"), "classifier");
        cr.baseline_auc = as_double(field(c, "baseline_auc"), "baseline_auc");
        for (const auto& pt : as_array(field(c, "points"), "points"))
            cr.points.push_back(
                {as_size(field(pt, "k"), "k"), as_double(field(pt, "auc"), "auc")});
        r.curves.push_back(std::move(cr));
    }

    for (const auto& row : as_array(field(doc, "best_subsets"), "best_subsets")) {
        BestSubsetRow br;
        br.classifier_name = as_string(field(row, "classifier"), "classifier");
        br.cap = as_size(field(row, "cap"), "cap");
        for (const auto& e : as_array(field(row, "entries"), "entries"))
            br.entries.push_back({as_size(field(e, "k"), "k"),
                                  as_string(field(e, "ranker"), "ranker"),
                                  as_double(field(e, "auc"), "auc")});
        r.best_subsets.push_back(std::move(br));
    }

    for (const auto& s : as_array(field(doc, "spearman_stability"), "spearman_stability"))
        r.spearman_stability.push_back(score_from_doc(s));

    for (const auto& p : as_array(field(doc, "jaccard_profiles"), "jaccard_profiles")) {
        JaccardProfile jp;
        for (const auto& pt : as_array(field(p, "points"), "points"))
            jp.points.emplace_back(as_size(field(pt, "k"), "k"),
                                   as_double(field(pt, "value"), "value"));
        jp.mean_over_all_k = as_double(field(p, "mean_over_all_k"), "mean_over_all_k");
        r.jaccard_profiles.push_back(std::move(jp));
    }

    const json& mds = field(doc, "mds");
    for (const auto& l : as_array(field(mds, "labels"), "labels"))
        r.dissimilarity.labels.emplace_back(as_string(field(l, "ranker"), "ranker"),
                                            as_size(field(l, "run"), "run"));
    const json& dis = as_array(field(mds, "dissimilarity"), "dissimilarity");
    r.dissimilarity.n = dis.size();
    if (r.dissimilarity.n != r.dissimilarity.labels.size())
        throw ConfigError("mds labels and dissimilarity size mismatch");
    for (const auto& row : dis) {
        const json& rr = as_array(row, "dissimilarity row");
        if (rr.size() != r.dissimilarity.n)
            throw ConfigError("dissimilarity matrix must be square");
        for (const auto& v : rr)
            r.dissimilarity.values.push_back(as_double(v, "dissimilarity value"));
    }
    for (const auto& pt : as_array(field(mds, "coordinates"), "coordinates")) {
        const json& pp = as_array(pt, "coordinate");
        if (pp.size() != 2) throw ConfigError("coordinates must be 2D");
        r.embedding.coordinates.push_back(as_double(pp[0], "x"));
        r.embedding.coordinates.push_back(as_double(pp[1], "y"));
    }
    r.embedding.stress = as_double(field(mds, "stress"), "stress");
    r.embedding.iterations = as_size(field(mds, "iterations"), "iterations");
    r.embedding.converged = as_bool(field(mds, "converged"), "converged");
    r.embedding.stress_history = double_vector(field(mds, "stress_history"), "stress_history");
    r.embedding.labels = r.dissimilarity.labels;
    for (const auto& dj : as_array(field(mds, "dispersion"), "dispersion"))
        r.dispersions.emplace_back(as_string(field(dj, "ranker"), "ranker"),
                                   as_double(field(dj, "value"), "value"));
    return r;
}

// evenly spaced round-valued tick marks covering [lo, hi]
std::vector<double> nice_ticks(double lo, double hi, int target) {
    double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    double raw = span / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step =
        (norm <= 1.0 ? 1.0 : norm <= 2.0 ? 2.0 : norm <= 2.5 ? 2.5 : norm <= 5.0 ? 5.0 : 10.0) *
        mag;
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
        out.push_back(v);
    return out;
}

const char* kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};

void glyph_svg(std::ostringstream& svg, std::size_t shape, const std::string& color, double x,
               double y, const std::string& title) {
    std::string t = title.empty() ? std::string() : "<title>" + xml_escape(title) + "</title>";
    const std::string sx = fmt_px(x), sy = fmt_px(y);
    switch (shape % 6) {
        case 0:
            svg << "<circle cx=\"" << sx << "\" cy=\"" << sy << "\" r=\"4\" fill=\"" << color
                << "\" fill-opacity=\"0.85\">" << t << "</circle>\n";
            break;
        case 1:
            svg << "<rect x=\"" << fmt_px(x - 3.5) << "\" y=\"" << fmt_px(y - 3.5)
                << "\" width=\"7\" height=\"7\" fill=\"" << color << "\" fill-opacity=\"0.85\">"
                << t << "</rect>\n";
            break;
        case 2:
            svg << "<path d=\"M " << sx << "," << fmt_px(y - 4.5) << " L " << fmt_px(x + 4.2)
                << "," << fmt_px(y + 3.5) << " L " << fmt_px(x - 4.2) << "," << fmt_px(y + 3.5)
                << " Z\" fill=\"" << color << "\" fill-opacity=\"0.85\">" << t << "</path>\n";
            break;
        case 3:
            svg << "<path d=\"M " << sx << "," << fmt_px(y - 5.0) << " L " << fmt_px(x + 5.0)
                << "," << sy << " L " << sx << "," << fmt_px(y + 5.0) << " L " << fmt_px(x - 5.0)
                << "," << sy << " Z\" fill=\"" << color << "\" fill-opacity=\"0.85\">" << t
                << "</path>\n";
            break;
        case 4:
            svg << "<g stroke=\"" << color << "\" stroke-width=\"1.8\">" << t << "<line x1=\""
                << fmt_px(x - 3.5) << "\" y1=\"" << fmt_px(y - 3.5) << "\" x2=\""
                << fmt_px(x + 3.5) << "\" y2=\"" << fmt_px(y + 3.5) << "\"/><line x1=\""
                << fmt_px(x - 3.5) << "\" y1=\"" << fmt_px(y + 3.5) << "\" x2=\""
                << fmt_px(x + 3.5) << "\" y2=\"" << fmt_px(y - 3.5) << "\"/></g>\n";
            break;
        default:
            svg << "<g stroke=\"" << color << "\" stroke-width=\"1.8\">" << t << "<line x1=\""
                << fmt_px(x - 4.5) << "\" y1=\"" << sy << "\" x2=\"" << fmt_px(x + 4.5)
                << "\" y2=\"" << sy << "\"/><line x1=\"" << sx << "\" y1=\"" << fmt_px(y - 4.5)
                << "\" x2=\"" << sx << "\" y2=\"" << fmt_px(y + 4.5) << "\"/></g>\n";
            break;
    }
}

}  // namespace

std::string classifier_spec_to_json(const ClassifierSpec& spec) {
    return classifier_spec_doc(spec).dump(2) + "\n";
}

ClassifierSpec classifier_spec_from_json(const std::string& text) {
    return classifier_spec_from_doc(parse_doc(text));
}

std::string ranker_spec_to_json(const RankerSpec& spec) {
    return ranker_spec_doc(spec).dump(2) + "\n";
}

RankerSpec ranker_spec_from_json(const std::string& text) {
    return ranker_spec_from_doc(parse_doc(text));
}

std::string ensemble_to_json(const RankingEnsemble& e) { return ensemble_doc(e).dump(2) + "\n"; }

RankingEnsemble ensemble_from_json(const std::string& text) {
    return ensemble_from_doc(parse_doc(text));
}

std::string ensembles_to_json(const std::vector<RankingEnsemble>& ensembles) {
    json arr = json::array();
    for (const auto& e : ensembles) arr.push_back(ensemble_doc(e));
    return arr.dump(2) + "\n";
}

std::vector<RankingEnsemble> ensembles_from_json(const std::string& text) {
    json doc = parse_doc(text);
    std::vector<RankingEnsemble> out;
    if (doc.is_object()) {
        out.push_back(ensemble_from_doc(doc));
        return out;
    }
    for (const auto& e : as_array(doc, "ensembles")) out.push_back(ensemble_from_doc(e));
    return out;
}

std::string stability_score_to_json(const StabilityScore& s) { return score_doc(s).dump(2) + "\n"; }

SyntheticSpec synthetic_spec_from_json(const std::string& text) {
    json doc = parse_doc(text);
    SyntheticSpec spec;
    spec.n_instances = as_size(field(doc, "n_instances"), "n_instances");
    if (const json* v = opt_field(doc, "n_informative"))
        spec.n_informative = as_size(*v, "n_informative");
    if (const json* v = opt_field(doc, "n_noise")) spec.n_noise = as_size(*v, "n_noise");
    if (const json* v = opt_field(doc, "n_redundant"))
        spec.n_redundant = as_size(*v, "n_redundant");
    if (const json* v = opt_field(doc, "snp_fraction"))
        spec.snp_fraction = as_double(*v, "snp_fraction");
    if (const json* v = opt_field(doc, "prevalence")) spec.prevalence = as_double(*v, "prevalence");
    if (const json* v = opt_field(doc, "seed")) spec.seed = as_u64(*v, "seed");
    if (const json* v = opt_field(doc, "coefficients")) {
        if (v->is_number()) {
            spec.coefficients.assign(spec.n_informative, as_double(*v, "coefficients"));
        } else {
            spec.coefficients = double_vector(*v, "coefficients");
        }
    } else {
        spec.coefficients.assign(spec.n_informative, 1.5);
    }
    validate_synthetic_spec(spec);
    return spec;
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
    return config_doc(cfg).dump(2) + "\n";
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
    return config_from_doc(parse_doc(text));
}

std::string report_to_json(const StabilityReport& r) { return report_doc(r).dump(2) + "\n"; }

StabilityReport report_from_json(const std::string& text) {
    return report_from_doc(parse_doc(text));
}

std::string jaccard_profile_csv(const JaccardProfile& profile) {
    std::string out = "k,value\n";
    for (const auto& [k, value] : profile.points) {
        out += std::to_string(k);
        out += ',';
        out += format_double(value);
        out += '\n';
    }
    return out;
}

std::string curve_csv(const CurveResult& c) {
    std::string out = "k,auc\n";
    for (const auto& pt : c.points) {
        out += std::to_string(pt.k);
        out += ',';
        out += format_double(pt.auc);
        out += '\n';
    }
    return out;
}

std::string embedding_csv(const Embedding& e) {
    std::string out = "ranker,run,x,y\n";
    for (std::size_t i = 0; i < e.labels.size(); ++i) {
        out += e.labels[i].first;
        out += ',';
        out += std::to_string(e.labels[i].second);
        out += ',';
        out += format_double(e.x(i));
        out += ',';
        out += format_double(e.y(i));
        out += '\n';
    }
    return out;
}

std::string compare_table_csv(const std::vector<CompareRow>& rows) {
    std::string out = "set,classifier,k,auc\n";
    for (const auto& r : rows) {
        out += r.set_name;
        out += ',';
        out += r.classifier_name;
        out += ',';
        out += std::to_string(r.k);
        out += ',';
        out += format_double(r.auc);
        out += '\n';
    }
    return out;
}

std::string curve_svg(const CurveResult& c) {
    std::ostringstream svg;
    const double ml = 62, mr = 24, mt = 40, mb = 52;
    const double pw = 640 - ml - mr, ph = 400 - mt - mb;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
           "viewBox=\"0 0 640 400\">\n";
    svg << "<rect width=\"640\" height=\"400\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"" << fmt_px(ml) << "\" y=\"22\" font-family=\"sans-serif\" "
           "font-size=\"15\" fill=\"#222\">"
        << xml_escape(c.ranker_name) << " + " << xml_escape(c.classifier_name)
        << " (AUC vs k)</text>\n";
    if (c.points.empty()) {
        svg << "<text x=\"280\" y=\"200\" font-family=\"sans-serif\" font-size=\"13\" "
               "fill=\"#666\">no data</text>\n</svg>\n";
        return svg.str();
    }
    double x0 = static_cast<double>(c.points.front().k);
    double x1 = static_cast<double>(c.points.back().k);
    if (x1 <= x0) {
        x0 = std::max(0.0, x0 - 1.0);
        x1 = x1 + 1.0;
    }
    double lo = c.baseline_auc, hi = c.baseline_auc;
    for (const auto& pt : c.points) {
        lo = std::min(lo, pt.auc);
        hi = std::max(hi, pt.auc);
    }
    double pad = std::max(0.02, (hi - lo) * 0.1);
    lo = std::max(0.0, lo - pad);
    hi = std::min(1.0, hi + pad);
    if (hi - lo < 1e-9) {
        lo = std::max(0.0, hi - 0.1);
        if (hi - lo < 1e-9) hi = lo + 0.1;
    }
    auto px = [&](double k) { return ml + (k - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return mt + (1.0 - (v - lo) / (hi - lo)) * ph; };

    for (double v : nice_ticks(lo, hi, 5)) {
        const std::string y = fmt_px(py(v));
        svg << "<line x1=\"" << fmt_px(ml) << "\" y1=\"" << y << "\" x2=\"" << fmt_px(ml + pw)
            << "\" y2=\"" << y << "\" stroke=\"#eeeeee\"/>\n";
        svg << "<text x=\"" << fmt_px(ml - 7) << "\" y=\"" << fmt_px(py(v) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
               "fill=\"#444\">"
            << fmt_sig(v) << "</text>\n";
    }
    std::size_t stride = (c.points.size() + 7) / 8;
    if (stride == 0) stride = 1;
    std::size_t last_drawn = c.points.size();
    for (std::size_t i = 0; i < c.points.size(); i += stride) {
        last_drawn = i;
        const std::string x = fmt_px(px(static_cast<double>(c.points[i].k)));
        svg << "<line x1=\"" << x << "\" y1=\"" << fmt_px(mt + ph) << "\" x2=\"" << x
            << "\" y2=\"" << fmt_px(mt + ph + 4) << "\" stroke=\"#333333\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << fmt_px(mt + ph + 17)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
               "fill=\"#444\">"
            << c.points[i].k << "</text>\n";
    }
    if (last_drawn + 1 != c.points.size()) {
        const std::string x = fmt_px(px(static_cast<double>(c.points.back().k)));
        svg << "<text x=\"" << x << "\" y=\"" << fmt_px(mt + ph + 17)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
               "fill=\"#444\">"
            << c.points.back().k << "</text>\n";
    }
    svg << "<line x1=\"" << fmt_px(ml) << "\" y1=\"" << fmt_px(mt + ph) << "\" x2=\""
        << fmt_px(ml + pw) << "\" y2=\"" << fmt_px(mt + ph) << "\" stroke=\"#333333\"/>\n";
    svg << "<line x1=\"" << fmt_px(ml) << "\" y1=\"" << fmt_px(mt) << "\" x2=\"" << fmt_px(ml)
        << "\" y2=\"" << fmt_px(mt + ph) << "\" stroke=\"#333333\"/>\n";

    const std::string by = fmt_px(py(c.baseline_auc));
    svg << "<line x1=\"" << fmt_px(ml) << "\" y1=\"" << by << "\" x2=\"" << fmt_px(ml + pw)
        << "\" y2=\"" << by << "\" stroke=\"#888888\" stroke-dasharray=\"5,4\"/>\n";
    svg << "<text x=\"" << fmt_px(ml + pw - 4) << "\" y=\"" << fmt_px(py(c.baseline_auc) - 5)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#666\">"
           "full set "
        << fmt_sig(c.baseline_auc) << "</text>\n";

    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& pt : c.points)
        svg << fmt_px(px(static_cast<double>(pt.k))) << "," << fmt_px(py(pt.auc)) << " ";
    svg << "\"/>\n";
    for (const auto& pt : c.points) {
        svg << "<circle cx=\"" << fmt_px(px(static_cast<double>(pt.k))) << "\" cy=\""
            << fmt_px(py(pt.auc)) << "\" r=\"2.5\" fill=\"#1f77b4\"><title>k=" << pt.k
            << " auc=" << format_double(pt.auc) << "</title></circle>\n";
    }
    svg << "<text x=\"" << fmt_px(ml + pw / 2)
        << "\" y=\"390\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#222\">k</text>\n";
    svg << "<text x=\"16\" y=\"" << fmt_px(mt + ph / 2)
        << "\" transform=\"rotate(-90 16 " << fmt_px(mt + ph / 2)
        << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#222\">AUC</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string embedding_svg(const Embedding& e) {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg << "<rect width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"40\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
           "fill=\"#222\">Ranking runs (MDS)</text>\n";
    if (e.labels.empty()) {
        svg << "<text x=\"280\" y=\"240\" font-family=\"sans-serif\" font-size=\"13\" "
               "fill=\"#666\">no data</text>\n</svg>\n";
        return svg.str();
    }
    const double ml = 50, mt = 44, mb = 40;
    const double pw = 640 - ml - 170, ph = 480 - mt - mb;
    double xmin = e.x(0), xmax = e.x(0), ymin = e.y(0), ymax = e.y(0);
    for (std::size_t i = 0; i < e.labels.size(); ++i) {
        xmin = std::min(xmin, e.x(i));
        xmax = std::max(xmax, e.x(i));
        ymin = std::min(ymin, e.y(i));
        ymax = std::max(ymax, e.y(i));
    }
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-9}) * 1.15;
    const double scale = std::min(pw, ph) / span;
    auto px = [&](double x) { return ml + pw / 2 + (x - cx) * scale; };
    auto py = [&](double y) { return mt + ph / 2 - (y - cy) * scale; };

    svg << "<rect x=\"" << fmt_px(ml) << "\" y=\"" << fmt_px(mt) << "\" width=\"" << fmt_px(pw)
        << "\" height=\"" << fmt_px(ph) << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";

    std::vector<std::string> rankers;
    auto ranker_slot = [&](const std::string& name) {
        for (std::size_t i = 0; i < rankers.size(); ++i)
            if (rankers[i] == name) return i;
        rankers.push_back(name);
        return rankers.size() - 1;
    };
    for (std::size_t i = 0; i < e.labels.size(); ++i) {
        const std::size_t slot = ranker_slot(e.labels[i].first);
        std::string title = e.labels[i].first + " run " + std::to_string(e.labels[i].second) +
                            " (" + format_double(e.x(i)) + ", " + format_double(e.y(i)) + ")";
        glyph_svg(svg, slot, kPalette[slot % 8], px(e.x(i)), py(e.y(i)), title);
    }
    for (std::size_t i = 0; i < rankers.size(); ++i) {
        const double ly = mt + 14 + 20.0 * static_cast<double>(i);
        glyph_svg(svg, i, kPalette[i % 8], 640 - 150, ly, "");
        svg << "<text x=\"" << fmt_px(640 - 138) << "\" y=\"" << fmt_px(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">"
            << xml_escape(rankers[i]) << "</text>\n";
    }
    svg << "<text x=\"" << fmt_px(ml) << "\" y=\"" << fmt_px(480.0 - 14.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#666\">stress "
        << fmt_sig(e.stress) << ", iterations " << e.iterations << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<ManifestEntry> emit_report(const StabilityReport& report, const std::string& dir) {
    if (report.config.curve_grid.empty()) throw ConfigError("curve k grid is empty");
    if (report.config.jaccard_grid.empty()) throw ConfigError("jaccard k grid is empty");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir), ec);
    if (ec) throw DataError("cannot create output directory: " + dir);

    std::vector<ManifestEntry> manifest;
    auto emit = [&](const std::string& rel, const std::string& content) {
        fs::path full = fs::path(dir) / rel;
        if (full.has_parent_path()) {
            std::error_code sub_ec;
            fs::create_directories(full.parent_path(), sub_ec);
        }
        write_text_file(full.string(), content);
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        manifest.push_back({rel, content.size(), hex});
    };

    emit("report.json", report_to_json(report));
    for (const auto& c : report.curves) {
        const std::string base = "curves/" + c.ranker_name + "_" + c.classifier_name;
        emit(base + ".csv", curve_csv(c));
        emit(base + ".svg", curve_svg(c));
    }
    const std::size_t named =
        std::min(report.ensembles.size(),
                 std::min(report.spearman_stability.size(), report.jaccard_profiles.size()));
    if (report.spearman_stability.size() >= 1 && named >= 1) {
        std::string csv = "ranker,value\n";
        for (std::size_t i = 0; i < named; ++i) {
            csv += report.ensembles[i].ranker_name;
            csv += ',';
            csv += format_double(report.spearman_stability[i].value);
            csv += '\n';
        }
        emit("stability_spearman.csv", csv);
        std::string jp = "ranker,k,value\n";
        for (std::size_t i = 0; i < named; ++i) {
            for (const auto& [k, value] : report.jaccard_profiles[i].points) {
                jp += report.ensembles[i].ranker_name;
                jp += ',';
                jp += std::to_string(k);
                jp += ',';
                jp += format_double(value);
                jp += '\n';
            }
        }
        emit("jaccard_profile.csv", jp);
    }
    if (!report.embedding.labels.empty()) {
        emit("mds_coords.csv", embedding_csv(report.embedding));
        emit("mds_plot.svg", embedding_svg(report.embedding));
    }

    std::sort(manifest.begin(), manifest.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    json m;
    json files = json::array();
    for (const auto& entry : manifest) {
        json f;
        f["path"] = entry.path;
        f["bytes"] = entry.bytes;
        f["fnv1a64"] = entry.fnv1a64;
        files.push_back(std::move(f));
    }
    m["files"] = files;
    write_text_file((fs::path(dir) / "manifest.json").string(), m.dump(2) + "\n");
    return manifest;
}

}  // namespace rankstab
