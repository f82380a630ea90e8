#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "scansim/catalog.hpp"
#include "scansim/curation.hpp"
#include "scansim/flywheel.hpp"
#include "scansim/recognizer.hpp"
#include "scansim/scanner.hpp"
#include "scansim/world.hpp"

namespace scansim {

using ojson = nlohmann::ordered_json;

ojson to_json(const Section& s);
ojson to_json(const BookRecord& r);
ojson to_json(const CatalogConfig& c);
ojson to_json(const WorldConfig& c);
ojson to_json(const DeploymentConfig& c);
ojson to_json(const CurationConfig& c);
ojson to_json(const FlywheelConfig& c);
ojson to_json(const RecognizerModel& m);
ojson to_json(const Pose& p);
ojson to_json(const ScanWindow& w);
ojson to_json(const Observation& o);
ojson to_json(const LabelSequence& labels);
ojson to_json(const RawExample& r);
ojson to_json(const CuratedExample& c);
ojson to_json(const Rejection& r);
ojson to_json(const CurationReport& r);
ojson to_json(const DeploymentLog& log);
ojson to_json(const EvalSet& s);
ojson to_json(const EvalResult& r);
ojson to_json(const FlywheelReport& r);

// Readers fill defaults for absent keys and reject unknown keys and wrong
// types with InvalidConfig naming the dotted field path.
Section section_from_json(const nlohmann::json& j);
BookRecord book_from_json(const nlohmann::json& j);
CatalogConfig catalog_config_from_json(const nlohmann::json& j, const std::string& path = "catalog");
WorldConfig world_config_from_json(const nlohmann::json& j, const std::string& path = "world");
DeploymentConfig deployment_config_from_json(const nlohmann::json& j,
                                             const std::string& path = "deployment");
CurationConfig curation_config_from_json(const nlohmann::json& j,
                                         const std::string& path = "curation");
FlywheelConfig flywheel_config_from_json(const nlohmann::json& j,
                                         const std::string& path = "flywheel");
RecognizerModel recognizer_model_from_json(const nlohmann::json& j,
                                           const std::string& path = "recognizer");
Observation observation_from_json(const nlohmann::json& j);
RawExample raw_example_from_json(const nlohmann::json& j);
EvalSet eval_set_from_json(const nlohmann::json& j);

// JSON Lines datasets. Readers throw FormatError with the 1-based line.
void write_raw_jsonl(const RawDataset& raw, std::ostream& out);
RawDataset read_raw_jsonl(std::istream& in);
void write_curated_jsonl(const std::vector<CuratedExample>& data, std::ostream& out);
void write_rejected_jsonl(const std::vector<Rejection>& data, std::ostream& out);

}  // namespace scansim
