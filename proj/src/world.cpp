#include "scansim/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>

#include "scansim/error.hpp"
#include "scansim/json_io.hpp"
#include "scansim/rng.hpp"

namespace scansim {
namespace {

constexpr std::size_t kNoRecord = std::numeric_limits<std::size_t>::max();
constexpr double kEdgeEps = 1e-9;

}  // namespace

void validate(const WorldConfig& cfg) {
  if (!(cfg.aisle_width_m >= kMinAisleWidthM)) {
    throw InvalidConfig("world.aisle_width_m", "must be at least 0.9144 m (36 in)");
  }
  if (cfg.num_aisles < 1) throw InvalidConfig("world.num_aisles", "must be >= 1");
  if (cfg.columns_per_side < 1) throw InvalidConfig("world.columns_per_side", "must be >= 1");
  if (cfg.shelves_per_column < 1) throw InvalidConfig("world.shelves_per_column", "must be >= 1");
  if (!(cfg.shelf_width_m > 0.0)) throw InvalidConfig("world.shelf_width_m", "must be > 0");
  if (!(cfg.shelf_pitch_m > 0.0)) throw InvalidConfig("world.shelf_pitch_m", "must be > 0");
  if (std::lround(cfg.books_per_shelf_mean) < 1) {
    throw InvalidConfig("world.books_per_shelf_mean", "must round to >= 1");
  }
  if (cfg.p_absent < 0.0 || cfg.p_absent > 1.0) throw InvalidConfig("world.p_absent", "must be in [0,1]");
  if (cfg.p_swap < 0.0 || cfg.p_swap > 1.0) throw InvalidConfig("world.p_swap", "must be in [0,1]");
  if (!(cfg.degradation_mean > 0.0 && cfg.degradation_mean < 1.0)) {
    throw InvalidConfig("world.degradation_mean", "must be in (0,1)");
  }
  if (!(cfg.degradation_concentration > 0.0)) {
    throw InvalidConfig("world.degradation_concentration", "must be > 0");
  }
  if (!(cfg.advance_m > 0.0)) throw InvalidConfig("world.advance_m", "must be > 0");
  if (!(cfg.camera_coverage_m >= cfg.advance_m)) {
    throw InvalidConfig("world.camera_coverage_m", "must be at least advance_m");
  }
}

std::string ScanWindow::key() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "a%d/s%d/l%d/x%.4f", aisle, side, shelf, x_lo);
  return buf;
}

double ShelfWorld::slot_center_x(const Slot& s) const {
  return column_x_lo(s.column) +
         (s.position + 0.5) * config_.shelf_width_m / slots_per_shelf_;
}

std::size_t ShelfWorld::shelf_count() const {
  return static_cast<std::size_t>(config_.num_aisles) * 2 * config_.columns_per_side *
         config_.shelves_per_column;
}

std::size_t ShelfWorld::shelf_index(const ShelfId& id) const {
  return ((static_cast<std::size_t>(id.aisle) * 2 + id.side) * config_.columns_per_side +
          id.column) *
             config_.shelves_per_column +
         id.shelf;
}

std::span<const BookInstance> ShelfWorld::shelf_instances(const ShelfId& id) const {
  const std::size_t i = shelf_index(id);
  return std::span<const BookInstance>(instances_).subspan(
      shelf_begin_[i], shelf_begin_[i + 1] - shelf_begin_[i]);
}

ShelfWorld build_world(const Catalog& catalog, const WorldConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  if (catalog.size() == 0) throw InvalidConfig("catalog", "catalog is empty");

  ShelfWorld w;
  w.config_ = cfg;
  w.catalog_ = &catalog;
  w.seed_ = seed;
  w.slots_per_shelf_ = static_cast<int>(std::lround(cfg.books_per_shelf_mean));

  const std::size_t shelves = w.shelf_count();
  const std::size_t capacity = shelves * w.slots_per_shelf_;
  std::size_t on_shelf = 0;
  for (const auto& r : catalog.records()) on_shelf += r.status == Status::on_shelf;
  if (on_shelf > capacity) {
    throw CapacityExceeded("catalog has " + std::to_string(on_shelf) +
                           " on-shelf books but the world holds " +
                           std::to_string(capacity));
  }

  Rng rng(derive_seed(seed, Stream::kWorld));
  std::bernoulli_distribution absent(cfg.p_absent);
  std::bernoulli_distribution swap(cfg.p_swap);
  const double alpha = cfg.degradation_mean * cfg.degradation_concentration;
  const double beta = (1.0 - cfg.degradation_mean) * cfg.degradation_concentration;

  w.slot_record_.assign(capacity, kNoRecord);
  std::vector<std::vector<BookInstance>> per_shelf(shelves);
  std::size_t slot = 0;
  for (std::size_t ri = 0; ri < catalog.size(); ++ri) {
    const auto& r = catalog.at(ri);
    if (r.status != Status::on_shelf) continue;
    const std::size_t this_slot = slot++;
    w.slot_record_[this_slot] = ri;
    if (absent(rng)) {
      ++w.absent_;
      continue;
    }
    const std::size_t shelf = this_slot / w.slots_per_shelf_;
    std::size_t rest = shelf;
    Slot s;
    s.position = static_cast<int>(this_slot % w.slots_per_shelf_);
    s.shelf = static_cast<int>(rest % cfg.shelves_per_column);
    rest /= cfg.shelves_per_column;
    s.column = static_cast<int>(rest % cfg.columns_per_side);
    rest /= cfg.columns_per_side;
    s.side = static_cast<int>(rest % 2);
    s.aisle = static_cast<int>(rest / 2);
    per_shelf[shelf].push_back({r.book_id, ri, s, sample_beta(rng, alpha, beta)});
  }

  // Misshelving: swap neighbours in place, keeping slots fixed.
  for (auto& books : per_shelf) {
    for (std::size_t i = 0; i + 1 < books.size(); ++i) {
      if (!swap(rng)) continue;
      std::swap(books[i].book_id, books[i + 1].book_id);
      std::swap(books[i].record_index, books[i + 1].record_index);
      std::swap(books[i].degradation, books[i + 1].degradation);
    }
  }

  w.shelf_begin_.assign(shelves + 1, 0);
  for (std::size_t s = 0; s < shelves; ++s) {
    w.shelf_begin_[s + 1] = w.shelf_begin_[s] + per_shelf[s].size();
    for (auto& b : per_shelf[s]) {
      // Slot records follow the swapped books so section lookups agree with
      // what is physically on the shelf.
      const std::size_t linear = s * w.slots_per_shelf_ + b.slot.position;
      w.slot_record_[linear] = b.record_index;
      w.instances_.push_back(std::move(b));
    }
  }
  return w;
}

void check_bounds(const ShelfWorld& world, const ScanWindow& w) {
  const auto& cfg = world.config();
  if (w.aisle < 0 || w.aisle >= cfg.num_aisles) throw OutOfBounds("aisle out of range");
  if (w.side < 0 || w.side > 1) throw OutOfBounds("side must be 0 or 1");
  if (w.shelf < 0 || w.shelf >= cfg.shelves_per_column) throw OutOfBounds("shelf level out of range");
  const double length = world.side_length_m();
  if (!(w.x_hi > w.x_lo)) throw OutOfBounds("empty window interval");
  if (w.x_lo < -kEdgeEps || w.x_lo >= length - kEdgeEps) {
    throw OutOfBounds("window starts outside the shelving run");
  }
  // The camera may overhang the last column by at most one advance step.
  if (w.x_hi > length + cfg.advance_m + kEdgeEps) {
    throw OutOfBounds("window extends past the end of the shelving run");
  }
}

std::vector<BookInstance> ground_truth(const ShelfWorld& world, const ScanWindow& w) {
  check_bounds(world, w);
  const auto& cfg = world.config();
  std::vector<BookInstance> out;
  const int first = std::max(0, static_cast<int>(std::floor(w.x_lo / cfg.shelf_width_m)));
  const int last = std::min(cfg.columns_per_side - 1,
                            static_cast<int>(std::floor(w.x_hi / cfg.shelf_width_m)));
  for (int c = first; c <= last; ++c) {
    for (const auto& b : world.shelf_instances({w.aisle, w.side, c, w.shelf})) {
      const double x = world.slot_center_x(b.slot);
      if (x >= w.x_lo && x < w.x_hi) out.push_back(b);
    }
  }
  return out;
}

std::string ShelfWorld::section_for(const ScanWindow& w) const {
  const auto& cat = *catalog_;
  const std::size_t S = static_cast<std::size_t>(slots_per_shelf_);
  std::map<std::size_t, int> tally;  // section position -> count
  std::size_t anchor = kNoRecord;
  const int first = std::max(0, static_cast<int>(std::floor(w.x_lo / config_.shelf_width_m)));
  const int last = std::min(config_.columns_per_side - 1,
                            static_cast<int>(std::floor(w.x_hi / config_.shelf_width_m)));
  for (int c = first; c <= last; ++c) {
    const std::size_t shelf = shelf_index({w.aisle, w.side, c, w.shelf});
    for (std::size_t p = 0; p < S; ++p) {
      Slot s{w.aisle, w.side, c, w.shelf, static_cast<int>(p)};
      const double x = slot_center_x(s);
      const std::size_t linear = shelf * S + p;
      if (anchor == kNoRecord) anchor = linear;
      if (x < w.x_lo || x >= w.x_hi) continue;
      const std::size_t rec = slot_record_[linear];
      if (rec == kNoRecord) continue;
      const Section* sec = cat.section_of(cat.at(rec).call_number);
      tally[static_cast<std::size_t>(sec - cat.sections().data())]++;
    }
  }
  if (!tally.empty()) {
    auto best = tally.begin();
    for (auto it = tally.begin(); it != tally.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    return cat.sections()[best->first].id;
  }
  // Empty window: borrow the section of the nearest slotted book.
  if (anchor == kNoRecord) anchor = 0;
  for (std::size_t d = 0; d < slot_record_.size(); ++d) {
    for (std::size_t cand : {anchor >= d ? anchor - d : kNoRecord, anchor + d}) {
      if (cand < slot_record_.size() && slot_record_[cand] != kNoRecord) {
        return cat.section_of(cat.at(slot_record_[cand]).call_number)->id;
      }
    }
  }
  return cat.sections().front().id;
}

std::size_t stops_per_side(const ShelfWorld& world) {
  return static_cast<std::size_t>(
      std::llround(world.side_length_m() / world.config().advance_m));
}

std::vector<ScanWindow> enumerate_windows(const ShelfWorld& world) {
  const auto& cfg = world.config();
  const std::size_t stops = stops_per_side(world);
  std::vector<ScanWindow> out;
  out.reserve(static_cast<std::size_t>(cfg.num_aisles) * 2 * stops * cfg.shelves_per_column);
  for (int a = 0; a < cfg.num_aisles; ++a) {
    for (int side = 0; side < 2; ++side) {
      for (std::size_t k = 0; k < stops; ++k) {
        const double lo = static_cast<double>(k) * cfg.advance_m;
        const int column = std::min(cfg.columns_per_side - 1,
                                    static_cast<int>(std::floor(lo / cfg.shelf_width_m + kEdgeEps)));
        for (int level = 0; level < cfg.shelves_per_column; ++level) {
          out.push_back({a, side, column, level, lo, lo + cfg.camera_coverage_m});
        }
      }
    }
  }
  return out;
}

bool HeldOut::overlaps(const ScanWindow& w, double shelf_width_m) const {
  for (const auto& s : shelves) {
    if (s.aisle != w.aisle || s.side != w.side || s.shelf != w.shelf) continue;
    const double lo = s.column * shelf_width_m;
    const double hi = lo + shelf_width_m;
    if (w.x_lo < hi - kEdgeEps && w.x_hi > lo + kEdgeEps) return true;
  }
  return false;
}

HeldOut reserve_eval_shelves(const ShelfWorld& world, int num_shelves, int num_windows) {
  const auto& cfg = world.config();
  HeldOut h;
  if (num_shelves <= 0 || num_windows <= 0) return h;
  if (static_cast<std::size_t>(num_shelves) > world.shelf_count()) {
    throw InvalidConfig("flywheel.held_out_shelves", "more held-out shelves than the world has");
  }
  if (num_windows < num_shelves) {
    throw InvalidConfig("flywheel.held_out_windows", "need at least one window per held-out shelf");
  }
  if (cfg.camera_coverage_m > cfg.shelf_width_m) {
    throw InvalidConfig("world.camera_coverage_m", "held-out windows must fit inside one column");
  }
  // Take whole columns from the far end of the last aisle, skipping shelves
  // the catalog does not fill to the right end.
  for (int a = cfg.num_aisles - 1; a >= 0 && static_cast<int>(h.shelves.size()) < num_shelves; --a) {
    for (int side = 1; side >= 0 && static_cast<int>(h.shelves.size()) < num_shelves; --side) {
      for (int c = cfg.columns_per_side - 1; c >= 0 && static_cast<int>(h.shelves.size()) < num_shelves; --c) {
        for (int l = 0; l < cfg.shelves_per_column && static_cast<int>(h.shelves.size()) < num_shelves; ++l) {
          const ShelfId id{a, side, c, l};
          const auto books = world.shelf_instances(id);
          if (!books.empty() && books.back().slot.position >= world.slots_per_shelf() - 3) {
            h.shelves.push_back(id);
          }
        }
      }
    }
  }
  if (static_cast<int>(h.shelves.size()) < num_shelves) {
    throw InvalidConfig("flywheel.held_out_shelves", "more held-out shelves than filled shelves");
  }
  const int base = num_windows / num_shelves;
  const int extra = num_windows % num_shelves;
  const double span = cfg.shelf_width_m - cfg.camera_coverage_m;
  for (int i = 0; i < num_shelves; ++i) {
    const auto& s = h.shelves[i];
    const int m = base + (i < extra ? 1 : 0);
    for (int k = 0; k < m; ++k) {
      const double lo = world.column_x_lo(s.column) + (m == 1 ? 0.0 : span * k / (m - 1));
      h.windows.push_back({s.aisle, s.side, s.column, s.shelf, lo, lo + cfg.camera_coverage_m});
    }
  }
  return h;
}

void write_world_json(const ShelfWorld& world, std::ostream& out) {
  nlohmann::ordered_json j;
  j["config"] = to_json(world.config());
  j["seed"] = world.seed();
  j["slots_per_shelf"] = world.slots_per_shelf();
  j["absent"] = world.absent_count();
  auto& table = j["instances"] = nlohmann::ordered_json::array();
  for (const auto& b : world.instances()) {
    table.push_back({{"book_id", b.book_id},
                     {"aisle", b.slot.aisle},
                     {"side", b.slot.side},
                     {"column", b.slot.column},
                     {"shelf", b.slot.shelf},
                     {"position", b.slot.position},
                     {"degradation", b.degradation}});
  }
  out << j.dump(1) << '\n';
}

}  // namespace scansim
