#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "scansim/error.hpp"

namespace scansim::cli {

namespace fs = std::filesystem;

namespace {

class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

void write_json_file(const fs::path& p, const ojson& j) { open_out(p) << j.dump(2) << '\n'; }

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct Context {
  RunConfig cfg;
  fs::path run_dir;
};

Context load(const Common& c) {
  const std::string bytes = read_file(c.config_path);
  Context ctx{parse_run_config(bytes), {}};
  if (c.seed) ctx.cfg.seed = *c.seed;
  fs::path base = "out";
  if (!c.out.empty()) {
    base = c.out;
  } else if (const char* env = std::getenv("SCANSIM_OUT"); env != nullptr && *env != '\0') {
    base = env;
  } else if (ctx.cfg.out_dir) {
    base = *ctx.cfg.out_dir;
  }
  ctx.run_dir = base / run_id(bytes, ctx.cfg.seed);
  fs::create_directories(ctx.run_dir);
  return ctx;
}

struct Generated {
  Catalog catalog;
  std::optional<ShelfWorld> world;
};

void generate(const RunConfig& cfg, Generated& g) {
  g.catalog = generate_catalog(cfg.catalog, cfg.seed);
  g.world.emplace(build_world(g.catalog, cfg.world, cfg.seed));
}

int cmd_gen(const Context& ctx, std::ostream& out) {
  Generated g;
  generate(ctx.cfg, g);
  const auto& world = *g.world;
  const auto& fcfg = ctx.cfg.flywheel;
  write_json_file(ctx.run_dir / "config.json", to_json(ctx.cfg));
  {
    auto f = open_out(ctx.run_dir / "catalog.jsonl");
    write_catalog_jsonl(g.catalog, f);
  }
  {
    auto f = open_out(ctx.run_dir / "world.json");
    write_world_json(world, f);
  }
  write_json_file(ctx.run_dir / "model.json", scansim::to_json(ctx.cfg.recognizer));
  const HeldOut held = reserve_eval_shelves(world, fcfg.held_out_shelves, fcfg.held_out_windows);
  write_json_file(ctx.run_dir / "evalset_shelf.json", scansim::to_json(make_shelf_eval_set(world, held)));
  const auto& w = ctx.cfg.world;
  write_json_file(ctx.run_dir / "evalset_ocr_en.json",
                  scansim::to_json(make_ocr_eval_set(Task::ocr_en, fcfg.ocr_en_items, w.degradation_mean,
                                                     w.degradation_concentration, ctx.cfg.seed)));
  write_json_file(ctx.run_dir / "evalset_ocr_zh.json",
                  scansim::to_json(make_ocr_eval_set(Task::ocr_zh, fcfg.ocr_zh_items, w.degradation_mean,
                                                     w.degradation_concentration, ctx.cfg.seed)));
  out << ctx.run_dir.string() << '\n';
  return kExitOk;
}

int cmd_run(const Context& ctx, std::ostream& out, std::ostream& err) {
  Generated g;
  generate(ctx.cfg, g);
  const fs::path raw_dir = ctx.run_dir / "raw";
  const fs::path cur_dir = ctx.run_dir / "curated";
  fs::create_directories(raw_dir);
  fs::create_directories(cur_dir);

  auto sink = [&](int t, const DeploymentResult& d, const CuratedDataset& c) {
    char name[32];
    std::snprintf(name, sizeof(name), "iter_%03d", t);
    const std::string stem = name;
    {
      auto f = open_out(raw_dir / (stem + ".jsonl"));
      write_raw_jsonl(d.raw, f);
    }
    write_json_file(raw_dir / (stem + "_log.json"), scansim::to_json(d.log));
    {
      auto f = open_out(cur_dir / (stem + ".jsonl"));
      write_curated_jsonl(c.accepted, f);
    }
    {
      auto f = open_out(cur_dir / (stem + "_rejected.jsonl"));
      write_rejected_jsonl(c.rejected, f);
    }
    err << "iteration " << t << ": " << d.raw.size() << " images, " << c.accepted.size()
        << " accepted\n";
  };

  FlywheelState state;
  const FlywheelReport report = run_flywheel(*g.world, flywheel_settings(ctx.cfg), sink, &state);
  {
    auto f = open_out(ctx.run_dir / "report.json");
    write_report_json(report, f, to_json(ctx.cfg));
  }
  {
    auto f = open_out(ctx.run_dir / "report.csv");
    write_report_csv(report, f);
  }
  write_json_file(ctx.run_dir / "model.json", scansim::to_json(state.model));
  out << ctx.run_dir.string() << '\n';
  return kExitOk;
}

int cmd_curate(const Context& ctx, const std::string& raw_path, const std::string& catalog_path,
               std::ostream& out) {
  Catalog catalog;
  {
    std::ifstream in(catalog_path, std::ios::binary);
    if (!in) throw InputError("cannot read " + catalog_path);
    catalog = read_catalog_jsonl(in);
  }
  RawDataset raw;
  {
    std::ifstream in(raw_path, std::ios::binary);
    if (!in) throw InputError("cannot read " + raw_path);
    raw = read_raw_jsonl(in);
  }
  const auto curated = curate_dataset(raw, catalog, ctx.cfg.curation);
  {
    auto f = open_out(ctx.run_dir / "curated.jsonl");
    write_curated_jsonl(curated.accepted, f);
  }
  {
    auto f = open_out(ctx.run_dir / "rejected.jsonl");
    write_rejected_jsonl(curated.rejected, f);
  }
  write_json_file(ctx.run_dir / "curation_report.json", scansim::to_json(curated.report));
  out << ctx.run_dir.string() << '\n';
  return kExitOk;
}

nlohmann::json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(0, path + ": " + e.what());
  }
}

int cmd_eval(const Context& ctx, const std::string& model_path, const std::string& set_path,
             int trials, std::ostream& out) {
  const RecognizerModel model = recognizer_model_from_json(parse_json_file(model_path), "model");
  validate(model);
  const EvalSet set = eval_set_from_json(parse_json_file(set_path));
  const EvalResult r = evaluate(model, set, derive_seed(ctx.cfg.seed, Stream::kEval), trials);
  const ojson j = scansim::to_json(r);
  write_json_file(ctx.run_dir / ("eval_" + std::string(to_string(r.task)) + ".json"), j);
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_report(const Context& ctx, std::ostream& out) {
  const fs::path path = ctx.run_dir / "report.json";
  if (!fs::exists(path)) throw InputError("no report at " + path.string() + "; run `scansim run` first");
  const auto j = parse_json_file(path.string());
  char buf[256];
  out << "  t  images  accepted  dataset  shelf   ocr_en  ocr_zh  interv  shelves  hours\n";
  for (const auto& row : j.at("rows")) {
    std::snprintf(buf, sizeof(buf), "%3d  %6zu  %8zu  %7zu  %.3f   %.3f   %.3f   %6zu  %7zu  %5.2f\n",
                  row.at("t").get<int>(), row.at("images_raw").get<std::size_t>(),
                  row.at("images_accepted").get<std::size_t>(), row.at("dataset_size").get<std::size_t>(),
                  row.at("eval").at("shelf").at("mean").get<double>(),
                  row.at("eval").at("ocr_en").at("mean").get<double>(),
                  row.at("eval").at("ocr_zh").at("mean").get<double>(),
                  row.at("interventions").get<std::size_t>(),
                  row.at("shelves_scanned_cum").get<std::size_t>(),
                  row.at("hours_saved_cum").get<double>());
    out << buf;
  }
  const auto& tot = j.at("totals");
  std::snprintf(buf, sizeof(buf), "total: %zu shelves, %zu images, %zu interventions, %.2f h saved\n",
                tot.at("shelves").get<std::size_t>(), tot.at("images").get<std::size_t>(),
                tot.at("interventions").get<std::size_t>(), tot.at("hours_saved").get<double>());
  out << buf;
  return kExitOk;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "Run configuration (JSON)")->required();
  sub->add_option("--seed", c.seed, "Override the config seed");
  sub->add_option("--out", c.out, "Output root (default $SCANSIM_OUT, then config \"out\", then ./out)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shelf-scanning data flywheel simulator"};
  app.require_subcommand(1);

  Common common;
  std::string raw_path, catalog_path, model_path, set_path;
  int trials = 200;

  auto* gen = app.add_subcommand("gen", "Generate catalog, world, eval sets and base model");
  add_common(gen, common);
  auto* run = app.add_subcommand("run", "Run the flywheel and write the report");
  add_common(run, common);
  auto* curate = app.add_subcommand("curate", "Curate an existing raw dataset");
  add_common(curate, common);
  curate->add_option("--raw", raw_path, "Raw dataset (JSON Lines)")->required();
  curate->add_option("--catalog", catalog_path, "Catalog (JSON Lines)")->required();
  auto* eval = app.add_subcommand("eval", "Evaluate a model on an eval set");
  add_common(eval, common);
  eval->add_option("--model", model_path, "Model state (JSON)")->required();
  eval->add_option("--evalset", set_path, "Eval set (JSON)")->required();
  eval->add_option("--trials", trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  auto* report = app.add_subcommand("report", "Summarize a finished run");
  add_common(report, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    const Context ctx = load(common);
    if (gen->parsed()) return cmd_gen(ctx, out);
    if (run->parsed()) return cmd_run(ctx, out, err);
    if (curate->parsed()) return cmd_curate(ctx, raw_path, catalog_path, out);
    if (eval->parsed()) return cmd_eval(ctx, model_path, set_path, trials, out);
    return cmd_report(ctx, out);
  } catch (const IterationFailed& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const InvalidConfig& e) {
    err << "error: config field " << e.what() << '\n';
    return kExitInput;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const MalformedCallNumber& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const UnknownSection& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const EmptySet& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const CapacityExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace scansim::cli
