// Parallel kernels against their serial references. With one core the
// ratio mostly shows scheduling overhead.

#include <benchmark/benchmark.h>

#include <optional>

#include "scansim/curation.hpp"
#include "scansim/recognizer.hpp"
#include "scansim/similarity.hpp"

using namespace scansim;

namespace {

struct Fixture {
  Catalog catalog;
  std::optional<ShelfWorld> world;
  RawDataset raw;
  EvalSet shelf_set;

  Fixture() {
    CatalogConfig cc;
    cc.num_books = 3000;
    cc.num_sections = 6;
    catalog = generate_catalog(cc, 1);
    WorldConfig wc;
    wc.num_aisles = 2;
    wc.columns_per_side = 6;
    world.emplace(build_world(catalog, wc, 1));
    DeploymentConfig dc;
    dc.horizon_s = 1800;
    raw = run_deployment(*world, RecognizerModel{}, dc, 1).raw;
    shelf_set = make_shelf_eval_set(*world, reserve_eval_shelves(*world, 10, 71));
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

std::span<const BookRecord> section() {
  const auto& cat = fixture().catalog;
  return cat.candidate_set(cat.sections().front().id);
}

void BM_NearestTitleTable(benchmark::State& state) {
  const auto cands = section();
  for (auto _ : state) benchmark::DoNotOptimize(nearest_title_table(cands));
}

void BM_NearestTitleTableSerial(benchmark::State& state) {
  const auto cands = section();
  for (auto _ : state) benchmark::DoNotOptimize(nearest_title_table_serial(cands));
}

void BM_Evaluate(benchmark::State& state) {
  const RecognizerModel m;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(m, fixture().shelf_set, 1, 50));
}

void BM_EvaluateSerial(benchmark::State& state) {
  const RecognizerModel m;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_serial(m, fixture().shelf_set, 1, 50));
}

void BM_CurateDataset(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(curate_dataset(f.raw, f.catalog, CurationConfig{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.raw.size()));
}

void BM_CurateDatasetSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(curate_dataset_serial(f.raw, f.catalog, CurationConfig{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.raw.size()));
}

}  // namespace

BENCHMARK(BM_NearestTitleTable)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestTitleTableSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurateDataset)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurateDatasetSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
