#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "scansim/catalog.hpp"
#include "scansim/curation.hpp"
#include "scansim/flywheel.hpp"
#include "scansim/json_io.hpp"
#include "scansim/recognizer.hpp"
#include "scansim/scanner.hpp"
#include "scansim/world.hpp"

namespace scansim::cli {

struct RunConfig {
  CatalogConfig catalog;
  WorldConfig world;
  DeploymentConfig deployment;
  RecognizerModel recognizer;
  CurationConfig curation;
  FlywheelConfig flywheel;
  std::uint64_t seed = 0;
  std::optional<std::string> out_dir;
};

// Parses and validates a config document. Absent sections and keys take
// their defaults; "seed" is required. Throws FormatError for malformed JSON
// and InvalidConfig naming the offending field.
RunConfig parse_run_config(std::string_view text);

// Every field, defaults included.
ojson to_json(const RunConfig& cfg);

FlywheelSettings flywheel_settings(const RunConfig& cfg);

// 16 hex digits of FNV-1a 64 over the config bytes and the seed.
std::string run_id(std::string_view config_bytes, std::uint64_t seed);

}  // namespace scansim::cli
