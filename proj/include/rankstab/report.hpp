#pragma once

#include <string>
#include <vector>

#include "rankstab/classifiers.hpp"
#include "rankstab/ingest.hpp"
#include "rankstab/mds.hpp"
#include "rankstab/pipeline.hpp"
#include "rankstab/rankers.hpp"
#include "rankstab/stability.hpp"

namespace rankstab {

// JSON wire formats. Parsers throw ConfigError on malformed documents;
// serializers are deterministic (stable key order, shortest round-trip
// float representation).

std::string classifier_spec_to_json(const ClassifierSpec& spec);
ClassifierSpec classifier_spec_from_json(const std::string& text);

std::string ranker_spec_to_json(const RankerSpec& spec);
RankerSpec ranker_spec_from_json(const std::string& text);

std::string ensemble_to_json(const RankingEnsemble& e);
RankingEnsemble ensemble_from_json(const std::string& text);

// A JSON array of ensembles; a single ensemble object is accepted too.
std::string ensembles_to_json(const std::vector<RankingEnsemble>& ensembles);
std::vector<RankingEnsemble> ensembles_from_json(const std::string& text);

std::string stability_score_to_json(const StabilityScore& s);

SyntheticSpec synthetic_spec_from_json(const std::string& text);

std::string pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const std::string& text);

std::string report_to_json(const StabilityReport& r);
StabilityReport report_from_json(const std::string& text);

// CSV / SVG builders (file content as a string).
std::string jaccard_profile_csv(const JaccardProfile& profile);
std::string curve_csv(const CurveResult& c);
std::string curve_svg(const CurveResult& c);
std::string embedding_csv(const Embedding& e);
std::string embedding_svg(const Embedding& e);
std::string compare_table_csv(const std::vector<CompareRow>& rows);

// Shortest round-trip decimal form of x (used by every CSV writer).
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rankstab
