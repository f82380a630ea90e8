#include "config.hpp"

#include <algorithm>
#include <cstdio>

#include "scansim/error.hpp"

namespace scansim::cli {

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte is one past the offending character
    throw FormatError(line_of(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  if (!j.is_object()) throw InvalidConfig("<root>", "expected an object");

  RunConfig cfg;
  bool have_seed = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = *it;
    if (key == "catalog") {
      cfg.catalog = catalog_config_from_json(v);
    } else if (key == "world") {
      cfg.world = world_config_from_json(v);
    } else if (key == "deployment") {
      cfg.deployment = deployment_config_from_json(v);
    } else if (key == "recognizer") {
      cfg.recognizer = recognizer_model_from_json(v);
    } else if (key == "curation") {
      cfg.curation = curation_config_from_json(v);
    } else if (key == "flywheel") {
      cfg.flywheel = flywheel_config_from_json(v);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw InvalidConfig("seed", "expected a non-negative integer");
      cfg.seed = v.get<std::uint64_t>();
      have_seed = true;
    } else if (key == "out") {
      if (!v.is_string()) throw InvalidConfig("out", "expected a string");
      cfg.out_dir = v.get<std::string>();
    } else {
      throw InvalidConfig(key, "unknown key");
    }
  }
  if (!have_seed) throw InvalidConfig("seed", "missing (no wall-clock default)");

  validate(cfg.catalog);
  validate(cfg.world);
  validate(cfg.deployment);
  validate(cfg.recognizer);
  validate(cfg.curation);
  validate(cfg.flywheel);
  return cfg;
}

ojson to_json(const RunConfig& cfg) {
  ojson j;
  j["seed"] = cfg.seed;
  j["catalog"] = scansim::to_json(cfg.catalog);
  j["world"] = scansim::to_json(cfg.world);
  j["deployment"] = scansim::to_json(cfg.deployment);
  j["recognizer"] = scansim::to_json(cfg.recognizer);
  j["curation"] = scansim::to_json(cfg.curation);
  j["flywheel"] = scansim::to_json(cfg.flywheel);
  if (cfg.out_dir) j["out"] = *cfg.out_dir;
  return j;
}

FlywheelSettings flywheel_settings(const RunConfig& cfg) {
  FlywheelSettings s;
  s.deployment = cfg.deployment;
  s.curation = cfg.curation;
  s.base = cfg.recognizer;
  s.flywheel = cfg.flywheel;
  s.seed = cfg.seed;
  return s;
}

std::string run_id(std::string_view config_bytes, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  feed(config_bytes);
  feed("\n");
  feed(std::to_string(seed));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace scansim::cli
