#include "scansim/flywheel.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>
#include <utility>

#include "scansim/error.hpp"
#include "scansim/json_io.hpp"
#include "scansim/rng.hpp"
#include "scansim/similarity.hpp"

namespace scansim {

void validate(const FlywheelConfig& cfg) {
  if (cfg.iterations < 1) throw InvalidConfig("flywheel.iterations", "must be >= 1");
  if (cfg.eval_trials < 1) throw InvalidConfig("flywheel.eval_trials", "must be >= 1");
  if (cfg.held_out_shelves < 1) throw InvalidConfig("flywheel.held_out_shelves", "must be >= 1");
  if (cfg.held_out_windows < 1) throw InvalidConfig("flywheel.held_out_windows", "must be >= 1");
  if (cfg.ocr_en_items < 1) throw InvalidConfig("flywheel.ocr_en_items", "must be >= 1");
  if (cfg.ocr_zh_items < 1) throw InvalidConfig("flywheel.ocr_zh_items", "must be >= 1");
  if (!(cfg.manual_seconds_per_shelf >= 0.0)) {
    throw InvalidConfig("flywheel.manual_seconds_per_shelf", "must be >= 0");
  }
}

IterationFailed::IterationFailed(int t, const std::string& what)
    : Error("iteration " + std::to_string(t) + ": " + what), t_(t) {}

namespace {

using Key = std::pair<std::string, double>;

Key key_of(const CuratedExample& ex) {
  return {ex.observation.window.key(), ex.observation.timestamp_s};
}

}  // namespace

Dataset aggregate(const Dataset& prev, const Dataset& next) {
  Dataset out;
  out.reserve(prev.size() + next.size());
  std::set<Key> seen;
  for (const auto* part : {&prev, &next}) {
    for (const auto& ex : *part) {
      if (seen.insert(key_of(ex)).second) out.push_back(ex);
    }
  }
  return out;
}

Totals compute_metrics(const std::vector<DeploymentLog>& logs, double manual_seconds_per_shelf) {
  Totals t;
  for (const auto& log : logs) {
    t.shelves += log.shelves_scanned;
    t.images += log.images_captured;
    t.interventions += log.interventions.size();
  }
  t.hours_saved = static_cast<double>(t.shelves) * manual_seconds_per_shelf / 3600.0;
  return t;
}

FlywheelReport run_flywheel(const ShelfWorld& world, const FlywheelSettings& settings,
                            const IterationSink& sink, FlywheelState* state_out) {
  const auto& fcfg = settings.flywheel;
  validate(fcfg);
  validate(settings.deployment);
  validate(settings.curation);
  validate(settings.base);

  const HeldOut held_out =
      reserve_eval_shelves(world, fcfg.held_out_shelves, fcfg.held_out_windows);
  const auto& wcfg = world.config();
  const EvalSet shelf_set = make_shelf_eval_set(world, held_out);
  const EvalSet en_set = make_ocr_eval_set(Task::ocr_en, fcfg.ocr_en_items, wcfg.degradation_mean,
                                           wcfg.degradation_concentration, settings.seed);
  const EvalSet zh_set = make_ocr_eval_set(Task::ocr_zh, fcfg.ocr_zh_items, wcfg.degradation_mean,
                                           wcfg.degradation_concentration, settings.seed);

  FlywheelState state;
  state.model = settings.base;
  FlywheelReport report;
  SubstitutionIndex subs(world.catalog());
  std::size_t cursor = 0;
  // Iterations are deployment days; timestamps stay unique across days.
  const double day_s = std::max(86400.0, settings.deployment.horizon_s);

  for (int t = 1; t <= fcfg.iterations; ++t) {
    try {
      DeploymentOptions opts;
      opts.start_stop = cursor;
      opts.time_offset_s = static_cast<double>(t - 1) * day_s;
      opts.held_out = &held_out;
      opts.substitutions = &subs;
      const auto deployment =
          run_deployment(world, state.model, settings.deployment,
                         derive_seed(settings.seed, Stream::kIteration, static_cast<std::uint64_t>(t)),
                         opts);
      cursor = deployment.log.next_stop;

      const auto curated = curate_dataset(deployment.raw, world.catalog(), settings.curation);
      state.dataset = aggregate(state.dataset, curated.accepted);
      for (const auto& ex : state.dataset) {
        if (held_out.overlaps(ex.observation.window, wcfg.shelf_width_m)) {
          ++report.held_out_violations;
        }
      }
      if (report.held_out_violations > 0) throw Error("held-out window in training data");

      state.model = finetune(settings.base, state.dataset.size());
      state.logs.push_back(deployment.log);
      state.t = t;

      IterationRow row;
      row.t = t;
      row.images_raw = deployment.raw.size();
      row.images_accepted = curated.accepted.size();
      row.dataset_size = state.dataset.size();
      row.interventions = deployment.log.interventions.size();
      row.acceptance_ratio = curated.report.acceptance_ratio;
      row.precision = curated.report.precision;
      // The same eval seed every iteration, so accuracy differences
      // reflect the model rather than sampling noise.
      const std::uint64_t eval_seed = derive_seed(settings.seed, Stream::kEval);
      if (shelf_set.size() > 0) row.shelf = evaluate(state.model, shelf_set, eval_seed, fcfg.eval_trials);
      row.shelf.task = Task::shelf;
      row.shelf.n_examples = state.model.n_examples;
      row.ocr_en = evaluate(state.model, en_set, eval_seed, fcfg.eval_trials);
      row.ocr_zh = evaluate(state.model, zh_set, eval_seed, fcfg.eval_trials);
      const Totals cum = compute_metrics(state.logs, fcfg.manual_seconds_per_shelf);
      row.shelves_cum = cum.shelves;
      row.hours_saved_cum = cum.hours_saved;
      report.rows.push_back(row);

      if (sink) sink(t, deployment, curated);
    } catch (const IterationFailed&) {
      throw;
    } catch (const std::exception& e) {
      throw IterationFailed(t, e.what());
    }
  }
  report.totals = compute_metrics(state.logs, fcfg.manual_seconds_per_shelf);
  if (state_out) *state_out = std::move(state);
  return report;
}

void write_report_json(const FlywheelReport& report, std::ostream& out,
                       const nlohmann::ordered_json& provenance) {
  nlohmann::ordered_json j = to_json(report);
  if (!provenance.is_null()) j["config"] = provenance;
  out << j.dump(2) << '\n';
}

void write_report_csv(const FlywheelReport& report, std::ostream& out) {
  out << "t,images_raw,images_accepted,dataset_size,shelf_acc,ocr_en_acc,ocr_zh_acc,"
         "interventions,shelves_cum,hours_saved_cum\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%zu,%zu,%zu,%.6f,%.6f,%.6f,%zu,%zu,%.4f\n", r.t,
                  r.images_raw, r.images_accepted, r.dataset_size, r.shelf.mean, r.ocr_en.mean,
                  r.ocr_zh.mean, r.interventions, r.shelves_cum, r.hours_saved_cum);
    out << buf;
  }
}

}  // namespace scansim
