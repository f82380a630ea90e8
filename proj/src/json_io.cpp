#include "scansim/json_io.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "scansim/call_number.hpp"
#include "scansim/error.hpp"
#include "scansim/text.hpp"

namespace scansim {

using nlohmann::json;

namespace {

std::string_view to_string(ScoreAggregate a) { return a == ScoreAggregate::mean ? "mean" : "min"; }

constexpr std::array<Language, 4> kMixOrder = {Language::zh, Language::ja, Language::ko,
                                               Language::en};

// Field lists shared by the writer and the strict reader.
template <class C, class V>
void fields(C& c, V& v, WorldConfig*) {
  v("aisle_width_m", c.aisle_width_m);
  v("num_aisles", c.num_aisles);
  v("columns_per_side", c.columns_per_side);
  v("shelves_per_column", c.shelves_per_column);
  v("shelf_width_m", c.shelf_width_m);
  v("shelf_pitch_m", c.shelf_pitch_m);
  v("books_per_shelf_mean", c.books_per_shelf_mean);
  v("p_absent", c.p_absent);
  v("p_swap", c.p_swap);
  v("degradation_mean", c.degradation_mean);
  v("degradation_concentration", c.degradation_concentration);
  v("advance_m", c.advance_m);
  v("camera_coverage_m", c.camera_coverage_m);
}

template <class C, class V>
void fields(C& c, V& v, CatalogConfig*) {
  v("num_books", c.num_books);
  v("num_sections", c.num_sections);
  v("language_mix", c.language_mix);
  v("p_checked_out", c.p_checked_out);
  v("p_offsite", c.p_offsite);
}

template <class C, class V>
void fields(C& c, V& v, DeploymentConfig*) {
  v("horizon_s", c.horizon_s);
  v("sigma_y_m", c.sigma_y_m);
  v("sigma_psi_rad", c.sigma_psi_rad);
  v("sigma_pc_m", c.sigma_pc_m);
  v("points_per_scan", c.points_per_scan);
  v("reference_shelves", c.reference_shelves);
  v("lidar_half_range_m", c.lidar_half_range_m);
  v("intervention_threshold_m", c.intervention_threshold_m);
  v("intervention_cost_s", c.intervention_cost_s);
  v("t_image_s", c.t_image_s);
  v("t_move_s", c.t_move_s);
  v("t_correct_s", c.t_correct_s);
  v("c_blur", c.c_blur);
  v("c_skew", c.c_skew);
  v("p_clutter", c.p_clutter);
  v("clutter_points", c.clutter_points);
  v("clutter_depth_min_m", c.clutter_depth_min_m);
  v("clutter_depth_max_m", c.clutter_depth_max_m);
  v("clutter_length_m", c.clutter_length_m);
  v("drift_schedule_y_m", c.drift_schedule_y_m);
}

template <class C, class V>
void fields(C& c, V& v, CurationConfig*) {
  v("theta_sim", c.theta_sim);
  v("theta_ord", c.theta_ord);
  v("snap_to_catalog", c.snap_to_catalog);
  v("title_weight", c.title_weight);
  v("aggregate", c.aggregate);
}

template <class C, class V>
void fields(C& c, V& v, FlywheelConfig*) {
  v("iterations", c.iterations);
  v("eval_trials", c.eval_trials);
  v("held_out_shelves", c.held_out_shelves);
  v("held_out_windows", c.held_out_windows);
  v("ocr_en_items", c.ocr_en_items);
  v("ocr_zh_items", c.ocr_zh_items);
  v("manual_seconds_per_shelf", c.manual_seconds_per_shelf);
}

template <class C, class V>
void fields(C& c, V& v, LearningCurve*) {
  v("a0", c.a0);
  v("A", c.A);
  v("tau", c.tau);
}

template <class C, class V>
void fields(C& c, V& v, TaskCurves*) {
  v("shelf", c.shelf);
  v("ocr_en", c.ocr_en);
  v("ocr_zh", c.ocr_zh);
}

template <class C, class V>
void fields(C& c, V& v, NoiseParams*) {
  v("w", c.w);
  v("q_sub", c.q_sub);
  v("q_omit", c.q_omit);
  v("q_hall", c.q_hall);
  v("edit_rate", c.edit_rate);
  v("mean_degradation", c.mean_degradation);
}

template <class C, class V>
void fields(C& c, V& v, RecognizerModel*) {
  v("n_examples", c.n_examples);
  v("curves", c.curves);
  v("noise", c.noise);
  v("seed", c.seed);
}

template <class T>
void visit(T& c, auto& v) {
  fields(c, v, static_cast<std::remove_const_t<T>*>(nullptr));
}

struct Writer {
  ojson& out;

  template <class T>
  void operator()(const char* key, const T& value) {
    out[key] = write(value);
  }

  static ojson write(double v) { return v; }
  static ojson write(int v) { return v; }
  static ojson write(bool v) { return v; }
  static ojson write(std::size_t v) { return v; }
  static ojson write(ScoreAggregate a) { return std::string(to_string(a)); }
  static ojson write(const std::vector<double>& v) { return v; }
  static ojson write(const std::array<double, 4>& mix) {
    ojson j = ojson::object();
    for (std::size_t i = 0; i < kMixOrder.size(); ++i) j[std::string(to_string(kMixOrder[i]))] = mix[i];
    return j;
  }
  template <class T>
  static ojson write(const T& nested) {
    ojson j = ojson::object();
    Writer w{j};
    visit(nested, w);
    return j;
  }
};

template <class T>
ojson write_fields(const T& c) {
  return Writer::write(c);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

struct Reader {
  const json& in;
  std::string path;
  std::set<std::string> seen;

  Reader(const json& j, std::string p) : in(j), path(std::move(p)) {
    if (!in.is_object()) throw InvalidConfig(path.empty() ? "<root>" : path, "expected an object");
  }

  template <class T>
  void operator()(const char* key, T& value) {
    seen.insert(key);
    auto it = in.find(key);
    if (it == in.end()) return;
    read(*it, join(path, key), value);
  }

  void finish() const {
    for (auto it = in.begin(); it != in.end(); ++it) {
      if (!seen.count(it.key())) throw InvalidConfig(join(path, it.key()), "unknown key");
    }
  }

  static void read(const json& j, const std::string& p, double& v) {
    if (!j.is_number()) throw InvalidConfig(p, "expected a number");
    v = j.get<double>();
  }
  static void read(const json& j, const std::string& p, int& v) {
    if (!j.is_number_integer()) throw InvalidConfig(p, "expected an integer");
    const auto x = j.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      throw InvalidConfig(p, "integer out of range");
    }
    v = static_cast<int>(x);
  }
  static void read(const json& j, const std::string& p, std::uint64_t& v) {
    if (!j.is_number_unsigned()) throw InvalidConfig(p, "expected a non-negative integer");
    v = j.get<std::uint64_t>();
  }
  static void read(const json& j, const std::string& p, bool& v) {
    if (!j.is_boolean()) throw InvalidConfig(p, "expected true or false");
    v = j.get<bool>();
  }
  static void read(const json& j, const std::string& p, ScoreAggregate& v) {
    if (j == "mean") {
      v = ScoreAggregate::mean;
    } else if (j == "min") {
      v = ScoreAggregate::min;
    } else {
      throw InvalidConfig(p, "expected \"mean\" or \"min\"");
    }
  }
  static void read(const json& j, const std::string& p, std::vector<double>& v) {
    if (!j.is_array()) throw InvalidConfig(p, "expected an array of numbers");
    v.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
      double x = 0.0;
      read(j[i], p + "[" + std::to_string(i) + "]", x);
      v.push_back(x);
    }
  }
  static void read(const json& j, const std::string& p, std::array<double, 4>& mix) {
    if (!j.is_object()) throw InvalidConfig(p, "expected an object keyed by language");
    std::array<double, 4> out{};
    for (auto it = j.begin(); it != j.end(); ++it) {
      Language lang{};
      try {
        lang = language_from_string(it.key());
      } catch (const std::exception&) {
        throw InvalidConfig(join(p, it.key()), "unknown language");
      }
      for (std::size_t i = 0; i < kMixOrder.size(); ++i) {
        if (kMixOrder[i] == lang) read(*it, join(p, it.key()), out[i]);
      }
    }
    mix = out;
  }
  template <class T>
  static void read(const json& j, const std::string& p, T& nested) {
    Reader r(j, p);
    visit(nested, r);
    r.finish();
  }
};

template <class T>
T read_fields(const json& j, const std::string& path) {
  T value{};
  Reader::read(j, path, value);
  return value;
}

// Strict accessors for data records.
const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidConfig(key, "missing");
  return *it;
}

std::string need_string(const json& j, const char* key) {
  const auto& v = need(j, key);
  if (!v.is_string()) throw InvalidConfig(key, "expected a string");
  return v.get<std::string>();
}

double need_number(const json& j, const char* key) {
  const auto& v = need(j, key);
  if (!v.is_number()) throw InvalidConfig(key, "expected a number");
  return v.get<double>();
}

int need_int(const json& j, const char* key) {
  int x = 0;
  Reader::read(need(j, key), key, x);
  return x;
}

LabelSequence labels_from_json(const json& j) {
  if (!j.is_array()) throw InvalidConfig("labels", "expected an array");
  LabelSequence out;
  for (const auto& e : j) out.push_back({need_string(e, "title"), need_string(e, "call_number")});
  return out;
}

ojson eval_entry(const EvalResult& r) { return {{"mean", r.mean}, {"stderr", r.std_error}}; }

}  // namespace

ojson to_json(const Section& s) {
  return {{"id", s.id}, {"lo", format_call_number(s.lo)}, {"hi", format_call_number(s.hi)}};
}

ojson to_json(const BookRecord& r) {
  return {{"book_id", r.book_id},
          {"title", r.title},
          {"call_number", format_call_number(r.call_number)},
          {"language", std::string(to_string(r.language))},
          {"status", std::string(to_string(r.status))}};
}

ojson to_json(const CatalogConfig& c) { return write_fields(c); }
ojson to_json(const WorldConfig& c) { return write_fields(c); }
ojson to_json(const DeploymentConfig& c) { return write_fields(c); }
ojson to_json(const CurationConfig& c) { return write_fields(c); }
ojson to_json(const FlywheelConfig& c) { return write_fields(c); }
ojson to_json(const RecognizerModel& m) { return write_fields(m); }

ojson to_json(const Pose& p) { return {{"x_m", p.x_m}, {"y_m", p.y_m}, {"psi_rad", p.psi_rad}}; }

ojson to_json(const ScanWindow& w) {
  return {{"aisle", w.aisle}, {"side", w.side}, {"column", w.column},
          {"shelf", w.shelf}, {"x_lo", w.x_lo}, {"x_hi", w.x_hi}};
}

ojson to_json(const Observation& o) {
  ojson visible = ojson::array();
  for (const auto& v : o.visible) {
    visible.push_back({{"book_id", v.book_id},
                       {"effective_degradation", v.effective_degradation},
                       {"title", v.title},
                       {"call_number", v.call_number}});
  }
  return {{"window", to_json(o.window)},
          {"section_id", o.section_id},
          {"capture_pose", to_json(o.capture_pose)},
          {"timestamp_s", o.timestamp_s},
          {"image", {{"height", o.meta.height}, {"width", o.meta.width}, {"channels", o.meta.channels}}},
          {"visible", visible}};
}

ojson to_json(const LabelSequence& labels) {
  ojson out = ojson::array();
  for (const auto& e : labels) out.push_back({{"title", e.title}, {"call_number", e.call_number}});
  return out;
}

ojson to_json(const RawExample& r) {
  return {{"observation", to_json(r.observation)}, {"predicted", to_json(r.predicted)}};
}

ojson to_json(const CuratedExample& c) {
  return {{"observation", to_json(c.observation)},
          {"label", to_json(c.label)},
          {"match_score", c.match_score},
          {"ord_score", c.ord_score}};
}

ojson to_json(const Rejection& r) {
  return {{"observation", to_json(r.observation)},
          {"predicted", to_json(r.predicted)},
          {"match_score", r.match_score},
          {"ord_score", r.ord_score},
          {"reason", r.reason}};
}

ojson to_json(const CurationReport& r) {
  ojson j = {{"accepted", r.accepted},
             {"rejected", r.rejected},
             {"acceptance_ratio", r.acceptance_ratio}};
  j["precision"] = r.precision ? ojson(*r.precision) : ojson(nullptr);
  return j;
}

ojson to_json(const DeploymentLog& log) {
  ojson events = ojson::array();
  for (const auto& e : log.interventions) {
    events.push_back({{"timestamp_s", e.timestamp_s},
                      {"pose_before", to_json(e.pose_before)},
                      {"cause", std::string(to_string(e.cause))}});
  }
  return {{"shelves_scanned", log.shelves_scanned},
          {"images_captured", log.images_captured},
          {"stops_visited", log.stops_visited},
          {"interventions", events},
          {"elapsed_s", log.elapsed_s},
          {"seed", log.seed},
          {"next_stop", log.next_stop}};
}

ojson to_json(const EvalSet& s) {
  ojson j;
  j["task"] = std::string(to_string(s.task));
  j["mean_degradation"] = s.mean_degradation;
  if (s.task == Task::shelf) {
    ojson items = ojson::array();
    for (const auto& o : s.shelf_items) items.push_back(to_json(o));
    j["shelf_items"] = items;
    ojson cands = ojson::object();
    for (const auto& [id, recs] : s.candidates) {
      ojson list = ojson::array();
      for (const auto& r : recs) list.push_back(to_json(r));
      cands[id] = list;
    }
    j["candidates"] = cands;
  } else {
    ojson items = ojson::array();
    for (const auto& i : s.ocr_items) items.push_back({{"text", i.text}, {"degradation", i.degradation}});
    j["ocr_items"] = items;
  }
  return j;
}

ojson to_json(const EvalResult& r) {
  return {{"task", std::string(to_string(r.task))},
          {"n_examples", r.n_examples},
          {"mean", r.mean},
          {"stderr", r.std_error},
          {"trials", r.trials}};
}

ojson to_json(const FlywheelReport& r) {
  ojson rows = ojson::array();
  for (const auto& row : r.rows) {
    ojson j;
    j["t"] = row.t;
    j["images_raw"] = row.images_raw;
    j["images_accepted"] = row.images_accepted;
    j["dataset_size"] = row.dataset_size;
    j["shelves_scanned_cum"] = row.shelves_cum;
    j["interventions"] = row.interventions;
    j["acceptance_ratio"] = row.acceptance_ratio;
    j["precision"] = row.precision ? ojson(*row.precision) : ojson(nullptr);
    j["eval"] = {{"shelf", eval_entry(row.shelf)},
                 {"ocr_en", eval_entry(row.ocr_en)},
                 {"ocr_zh", eval_entry(row.ocr_zh)}};
    j["hours_saved_cum"] = row.hours_saved_cum;
    rows.push_back(j);
  }
  ojson out;
  out["rows"] = rows;
  out["totals"] = {{"shelves", r.totals.shelves},
                   {"images", r.totals.images},
                   {"interventions", r.totals.interventions},
                   {"hours_saved", r.totals.hours_saved}};
  out["held_out_violations"] = r.held_out_violations;
  return out;
}

Section section_from_json(const json& j) {
  return {need_string(j, "id"), parse_call_number(need_string(j, "lo")),
          parse_call_number(need_string(j, "hi"))};
}

BookRecord book_from_json(const json& j) {
  BookRecord r;
  r.book_id = need_string(j, "book_id");
  r.title = need_string(j, "title");
  r.call_number = parse_call_number(need_string(j, "call_number"));
  r.language = language_from_string(need_string(j, "language"));
  r.status = j.contains("status") ? status_from_string(need_string(j, "status")) : Status::on_shelf;
  return r;
}

CatalogConfig catalog_config_from_json(const json& j, const std::string& path) {
  return read_fields<CatalogConfig>(j, path);
}
WorldConfig world_config_from_json(const json& j, const std::string& path) {
  return read_fields<WorldConfig>(j, path);
}
DeploymentConfig deployment_config_from_json(const json& j, const std::string& path) {
  return read_fields<DeploymentConfig>(j, path);
}
CurationConfig curation_config_from_json(const json& j, const std::string& path) {
  return read_fields<CurationConfig>(j, path);
}
FlywheelConfig flywheel_config_from_json(const json& j, const std::string& path) {
  return read_fields<FlywheelConfig>(j, path);
}
RecognizerModel recognizer_model_from_json(const json& j, const std::string& path) {
  return read_fields<RecognizerModel>(j, path);
}

Observation observation_from_json(const json& j) {
  Observation o;
  const auto& w = need(j, "window");
  o.window = {need_int(w, "aisle"), need_int(w, "side"), need_int(w, "column"),
              need_int(w, "shelf"), need_number(w, "x_lo"), need_number(w, "x_hi")};
  o.section_id = need_string(j, "section_id");
  const auto& p = need(j, "capture_pose");
  o.capture_pose = {need_number(p, "x_m"), need_number(p, "y_m"), need_number(p, "psi_rad")};
  o.timestamp_s = need_number(j, "timestamp_s");
  if (j.contains("image")) {
    const auto& m = j.at("image");
    o.meta = {need_int(m, "height"), need_int(m, "width"), need_int(m, "channels")};
  }
  const auto& vis = need(j, "visible");
  if (!vis.is_array()) throw InvalidConfig("visible", "expected an array");
  for (const auto& v : vis) {
    o.visible.push_back({need_string(v, "book_id"), need_number(v, "effective_degradation"),
                         need_string(v, "title"), need_string(v, "call_number")});
  }
  return o;
}

RawExample raw_example_from_json(const json& j) {
  return {observation_from_json(need(j, "observation")), labels_from_json(need(j, "predicted"))};
}

EvalSet eval_set_from_json(const json& j) {
  EvalSet s;
  s.task = task_from_string(need_string(j, "task"));
  s.mean_degradation = need_number(j, "mean_degradation");
  if (s.task == Task::shelf) {
    const auto& items = need(j, "shelf_items");
    if (!items.is_array()) throw InvalidConfig("shelf_items", "expected an array");
    for (const auto& o : items) s.shelf_items.push_back(observation_from_json(o));
    const auto& cands = need(j, "candidates");
    if (!cands.is_object()) throw InvalidConfig("candidates", "expected an object");
    for (auto it = cands.begin(); it != cands.end(); ++it) {
      auto& list = s.candidates[it.key()];
      for (const auto& r : *it) list.push_back(book_from_json(r));
    }
    for (const auto& o : s.shelf_items) {
      if (!s.candidates.count(o.section_id)) throw UnknownSection(o.section_id);
    }
  } else {
    const auto& items = need(j, "ocr_items");
    if (!items.is_array()) throw InvalidConfig("ocr_items", "expected an array");
    for (const auto& i : items) s.ocr_items.push_back({need_string(i, "text"), need_number(i, "degradation")});
  }
  return s;
}

void write_raw_jsonl(const RawDataset& raw, std::ostream& out) {
  for (const auto& r : raw) out << to_json(r).dump() << '\n';
}

RawDataset read_raw_jsonl(std::istream& in) {
  RawDataset out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(raw_example_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw FormatError(line_no, e.what());
    }
  }
  return out;
}

void write_curated_jsonl(const std::vector<CuratedExample>& data, std::ostream& out) {
  for (const auto& c : data) out << to_json(c).dump() << '\n';
}

void write_rejected_jsonl(const std::vector<Rejection>& data, std::ostream& out) {
  for (const auto& r : data) out << to_json(r).dump() << '\n';
}

}  // namespace scansim
