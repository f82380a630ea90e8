#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "config.hpp"
#include "scansim/json_io.hpp"

using namespace scansim;
namespace cli = scansim::cli;
namespace fs = std::filesystem;

namespace {

const char* kConfig = R"({
  "seed": 5,
  "catalog": {"num_books": 1300, "num_sections": 4},
  "world": {"num_aisles": 1, "columns_per_side": 4},
  "deployment": {"horizon_s": 300},
  "flywheel": {"iterations": 2, "eval_trials": 20, "held_out_shelves": 3,
               "held_out_windows": 6, "ocr_en_items": 50, "ocr_zh_items": 50}
})";

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "scansim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path trim(const std::string& s) { return fs::path(s.substr(0, s.find_last_not_of('\n') + 1)); }

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("scansim_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors") {
    CHECK(invoke({}).code == cli::kExitInput);
    CHECK(invoke({"--help"}).code == cli::kExitOk);
    CHECK(invoke({"fly"}).code == cli::kExitInput);
    CHECK(invoke({"run"}).code == cli::kExitInput);
    CHECK(invoke({"eval", "--config", "x.json", "--model", "m", "--evalset", "e", "--trials", "0"}).code ==
          cli::kExitInput);
  }

  TEST_CASE("config errors name the field") {
    TempDir tmp;
    auto r = invoke({"gen", "--config", (tmp.path / "missing.json").string(), "--out", tmp.path.string()});
    CHECK(r.code == cli::kExitInput);

    r = invoke({"gen", "--config", tmp.write("noseed.json", R"({"catalog": {}})").string(), "--out",
             tmp.path.string()});
    CHECK(r.code == cli::kExitInput);
    CHECK(r.err.find("seed") != std::string::npos);

    r = invoke({"gen", "--config", tmp.write("typo.json", R"({"seed": 1, "world": {"num_aisle": 2}})").string(),
             "--out", tmp.path.string()});
    CHECK(r.code == cli::kExitInput);
    CHECK(r.err.find("world.num_aisle") != std::string::npos);

    r = invoke({"gen", "--config", tmp.write("range.json", R"({"seed": 1, "curation": {"theta_sim": 2}})").string(),
             "--out", tmp.path.string()});
    CHECK(r.code == cli::kExitInput);
    CHECK(r.err.find("curation.theta_sim") != std::string::npos);

    r = invoke({"gen", "--config", tmp.write("broken.json", "{\"seed\": 1,\n  \"world\": }").string(), "--out",
             tmp.path.string()});
    CHECK(r.code == cli::kExitInput);
    CHECK(r.err.find("line 2") != std::string::npos);

    // More books than shelf slots.
    r = invoke({"gen", "--config",
             tmp.write("full.json", R"({"seed": 1, "catalog": {"num_books": 5000}, "world": {"num_aisles": 1, "columns_per_side": 2}})")
                 .string(),
             "--out", tmp.path.string()});
    CHECK(r.code == cli::kExitInput);
  }

  TEST_CASE("config parsing") {
    const auto cfg = cli::parse_run_config(kConfig);
    CHECK(cfg.seed == 5);
    CHECK(cfg.catalog.num_books == 1300);
    CHECK(cfg.flywheel.iterations == 2);
    CHECK(cfg.curation.theta_sim == 0.8);
    CHECK_FALSE(cfg.out_dir);
    // The materialized config parses back to the same thing.
    const auto again = cli::parse_run_config(cli::to_json(cfg).dump());
    CHECK(cli::to_json(again).dump() == cli::to_json(cfg).dump());
    CHECK(cli::run_id(kConfig, 5).size() == 16);
    CHECK(cli::run_id(kConfig, 5) != cli::run_id(kConfig, 6));
    CHECK(cli::run_id(kConfig, 5) == cli::run_id(kConfig, 5));
  }

  TEST_CASE("gen writes the world artifacts") {
    TempDir tmp;
    const auto cfg = tmp.write("cfg.json", kConfig);
    const auto r = invoke({"gen", "--config", cfg.string(), "--out", tmp.path.string()});
    REQUIRE(r.code == cli::kExitOk);
    const fs::path dir = trim(r.out);
    CHECK(dir.parent_path() == tmp.path);
    for (const char* f : {"config.json", "catalog.jsonl", "world.json", "model.json", "evalset_shelf.json",
                          "evalset_ocr_en.json", "evalset_ocr_zh.json"}) {
      CHECK_MESSAGE(fs::exists(dir / f), f);
    }
    std::ifstream cat(dir / "catalog.jsonl");
    CHECK(read_catalog_jsonl(cat).size() == 1300);
  }

  TEST_CASE("run is reproducible and seed-sensitive") {
    TempDir tmp;
    const auto cfg = tmp.write("cfg.json", kConfig);
    const auto a = invoke({"run", "--config", cfg.string(), "--out", (tmp.path / "a").string()});
    const auto b = invoke({"run", "--config", cfg.string(), "--out", (tmp.path / "b").string()});
    REQUIRE(a.code == cli::kExitOk);
    REQUIRE(b.code == cli::kExitOk);
    const fs::path da = trim(a.out), db = trim(b.out);
    CHECK(da.filename() == db.filename());
    for (const char* f : {"report.json", "report.csv", "model.json", "raw/iter_001.jsonl", "raw/iter_002.jsonl",
                          "curated/iter_001.jsonl", "curated/iter_002_rejected.jsonl",
                          "raw/iter_001_log.json"}) {
      REQUIRE_MESSAGE(fs::exists(da / f), f);
      CHECK_MESSAGE(slurp(da / f) == slurp(db / f), f);
    }
    std::istringstream csv(slurp(da / "report.csv"));
    int lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 3);
    const auto report = nlohmann::json::parse(slurp(da / "report.json"));
    CHECK(report["config"]["seed"] == 5);

    const auto c = invoke({"run", "--config", cfg.string(), "--seed", "6", "--out", (tmp.path / "a").string()});
    REQUIRE(c.code == cli::kExitOk);
    const fs::path dc = trim(c.out);
    CHECK(dc != da);
    CHECK(slurp(dc / "report.json") != slurp(da / "report.json"));
    CHECK(nlohmann::json::parse(slurp(dc / "report.json"))["config"]["seed"] == 6);

    const auto rep = invoke({"report", "--config", cfg.string(), "--out", (tmp.path / "a").string()});
    CHECK(rep.code == cli::kExitOk);
    CHECK(rep.out.find("hours") != std::string::npos);
    const auto none = invoke({"report", "--config", cfg.string(), "--out", (tmp.path / "empty").string()});
    CHECK(none.code == cli::kExitInput);
  }

  TEST_CASE("output root precedence") {
    TempDir tmp;
    const auto cfg = tmp.write("cfg.json", R"({"seed": 1, "out": ")" + (tmp.path / "from_config").string() +
                                               R"(", "catalog": {"num_books": 300, "num_sections": 2},
                                   "world": {"num_aisles": 1, "columns_per_side": 2},
                                   "flywheel": {"held_out_shelves": 1, "held_out_windows": 2,
                                                "ocr_en_items": 5, "ocr_zh_items": 5}})");
    const char* saved = std::getenv("SCANSIM_OUT");
    const std::string saved_value = saved ? saved : "";
    ::unsetenv("SCANSIM_OUT");
    auto r = invoke({"gen", "--config", cfg.string()});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(trim(r.out).parent_path() == tmp.path / "from_config");
    ::setenv("SCANSIM_OUT", (tmp.path / "from_env").c_str(), 1);
    r = invoke({"gen", "--config", cfg.string()});
    CHECK(trim(r.out).parent_path() == tmp.path / "from_env");
    r = invoke({"gen", "--config", cfg.string(), "--out", (tmp.path / "from_flag").string()});
    CHECK(trim(r.out).parent_path() == tmp.path / "from_flag");
    if (saved) {
      ::setenv("SCANSIM_OUT", saved_value.c_str(), 1);
    } else {
      ::unsetenv("SCANSIM_OUT");
    }
  }

  TEST_CASE("curate") {
    TempDir tmp;
    const auto cfg = tmp.write("cfg.json", kConfig);
    CatalogConfig cc;
    cc.num_books = 400;
    cc.num_sections = 2;
    const auto catalog = generate_catalog(cc, 3);
    {
      std::ofstream f(tmp.path / "catalog.jsonl", std::ios::binary);
      write_catalog_jsonl(catalog, f);
    }
    const auto& sec = catalog.sections().front();
    const auto cands = catalog.candidate_set(sec.id);
    RawExample perfect;
    perfect.observation.section_id = sec.id;
    for (std::size_t i = 10; i < 16; ++i) {
      perfect.observation.visible.push_back(
          {cands[i].book_id, 0.2, cands[i].title, format_call_number(cands[i].call_number)});
    }
    perfect.predicted = truth_labels(perfect.observation);
    RawExample junk = perfect;
    junk.observation.timestamp_s = 1;
    junk.predicted = {{"zzzz", "Q1 .A1"}};
    {
      std::ofstream f(tmp.path / "raw.jsonl", std::ios::binary);
      write_raw_jsonl({perfect, junk}, f);
    }
    const auto r = invoke({"curate", "--config", cfg.string(), "--out", tmp.path.string(), "--raw",
                        (tmp.path / "raw.jsonl").string(), "--catalog", (tmp.path / "catalog.jsonl").string()});
    REQUIRE(r.code == cli::kExitOk);
    const fs::path dir = trim(r.out);
    const auto report = nlohmann::json::parse(slurp(dir / "curation_report.json"));
    CHECK(report["accepted"] == 1);
    CHECK(report["rejected"] == 1);
    CHECK(report["precision"] == 1.0);
    const auto accepted = nlohmann::json::parse(slurp(dir / "curated.jsonl"));
    CHECK(accepted["label"].size() == 6);
    CHECK(slurp(dir / "rejected.jsonl").find("match_score") != std::string::npos);

    std::string lines = slurp(tmp.path / "raw.jsonl");
    lines += "{not json}\n";
    tmp.write("bad.jsonl", lines);
    const auto bad = invoke({"curate", "--config", cfg.string(), "--out", tmp.path.string(), "--raw",
                          (tmp.path / "bad.jsonl").string(), "--catalog", (tmp.path / "catalog.jsonl").string()});
    CHECK(bad.code == cli::kExitInput);
    CHECK(bad.err.find("line 3") != std::string::npos);

    const auto missing = invoke({"curate", "--config", cfg.string(), "--out", tmp.path.string(), "--raw",
                              (tmp.path / "nope.jsonl").string(), "--catalog",
                              (tmp.path / "catalog.jsonl").string()});
    CHECK(missing.code == cli::kExitInput);
  }

  TEST_CASE("eval") {
    TempDir tmp;
    const auto cfg = tmp.write("cfg.json", kConfig);
    const auto g = invoke({"gen", "--config", cfg.string(), "--out", tmp.path.string()});
    REQUIRE(g.code == cli::kExitOk);
    const fs::path dir = trim(g.out);
    auto eval = [&](const std::string& set, int trials) {
      return invoke({"eval", "--config", cfg.string(), "--out", tmp.path.string(), "--model",
                  (dir / "model.json").string(), "--evalset", (dir / set).string(), "--trials",
                  std::to_string(trials)});
    };
    const auto r = eval("evalset_ocr_en.json", 2000);
    REQUIRE(r.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["task"] == "ocr_en");
    CHECK(std::abs(j["mean"].get<double>() - 0.248) <= 4.0 * j["stderr"].get<double>());
    CHECK(fs::exists(dir / "eval_ocr_en.json"));

    const auto shelf = nlohmann::json::parse(eval("evalset_shelf.json", 200).out);
    CHECK(std::abs(shelf["mean"].get<double>() - 0.324) <= 4.0 * shelf["stderr"].get<double>() + 0.02);

    // Standard error shrinks like 1/sqrt(trials).
    const double few = nlohmann::json::parse(eval("evalset_ocr_zh.json", 10).out)["stderr"];
    const double many = nlohmann::json::parse(eval("evalset_ocr_zh.json", 1000).out)["stderr"];
    CHECK(few / many == doctest::Approx(10.0).epsilon(0.3));

    EvalSet empty;
    empty.task = Task::ocr_en;
    tmp.write("empty.json", scansim::to_json(empty).dump());
    CHECK(invoke({"eval", "--config", cfg.string(), "--out", tmp.path.string(), "--model",
               (dir / "model.json").string(), "--evalset", (tmp.path / "empty.json").string()})
              .code == cli::kExitInput);
    tmp.write("garbage.json", "[1, 2");
    CHECK(invoke({"eval", "--config", cfg.string(), "--out", tmp.path.string(), "--model",
               (dir / "model.json").string(), "--evalset", (tmp.path / "garbage.json").string()})
              .code == cli::kExitInput);
  }
}
