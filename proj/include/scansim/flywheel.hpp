#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "scansim/curation.hpp"
#include "scansim/error.hpp"
#include "scansim/recognizer.hpp"
#include "scansim/scanner.hpp"
#include "scansim/world.hpp"

namespace scansim {

struct FlywheelConfig {
  int iterations = 10;
  int eval_trials = 200;
  int held_out_shelves = 10;
  int held_out_windows = 71;
  int ocr_en_items = 644;
  int ocr_zh_items = 500;
  // Librarian estimate: 18.7 h over 2,103 shelves.
  double manual_seconds_per_shelf = 32.0;
};

void validate(const FlywheelConfig& cfg);

struct FlywheelSettings {
  DeploymentConfig deployment;
  CurationConfig curation;
  RecognizerModel base;  // FM0
  FlywheelConfig flywheel;
  std::uint64_t seed = 0;
};

using Dataset = std::vector<CuratedExample>;

// Keyed union: prev followed by the examples of `next` whose
// (window, timestamp) key is not already present.
Dataset aggregate(const Dataset& prev, const Dataset& next);

struct Totals {
  std::size_t shelves = 0;
  std::size_t images = 0;
  std::size_t interventions = 0;
  double hours_saved = 0.0;
};

Totals compute_metrics(const std::vector<DeploymentLog>& logs,
                       double manual_seconds_per_shelf = 32.0);

struct IterationRow {
  int t = 0;
  std::size_t images_raw = 0;
  std::size_t images_accepted = 0;
  std::size_t dataset_size = 0;
  std::size_t shelves_cum = 0;
  std::size_t interventions = 0;  // this iteration
  double acceptance_ratio = 0.0;
  std::optional<double> precision;
  EvalResult shelf;
  EvalResult ocr_en;
  EvalResult ocr_zh;
  double hours_saved_cum = 0.0;
};

struct FlywheelReport {
  std::vector<IterationRow> rows;
  Totals totals;
  std::size_t held_out_violations = 0;
};

struct FlywheelState {
  int t = 0;
  Dataset dataset;
  RecognizerModel model;
  std::vector<DeploymentLog> logs;
};

// Called after each iteration with that iteration's raw and curated data.
using IterationSink =
    std::function<void(int t, const DeploymentResult&, const CuratedDataset&)>;

// Deploy, curate, aggregate, fine-tune from the base model, evaluate on the
// held-out sets. Deployments resume traversal where the previous one
// stopped. Throws IterationFailed wrapping the first module error.
FlywheelReport run_flywheel(const ShelfWorld& world, const FlywheelSettings& settings,
                            const IterationSink& sink = {}, FlywheelState* state = nullptr);

class IterationFailed : public Error {
 public:
  IterationFailed(int t, const std::string& what);
  int iteration() const { return t_; }

 private:
  int t_;
};

// `provenance` (typically the materialized config) is embedded verbatim
// when not null.
void write_report_json(const FlywheelReport& report, std::ostream& out,
                       const nlohmann::ordered_json& provenance = nullptr);
void write_report_csv(const FlywheelReport& report, std::ostream& out);

}  // namespace scansim
