#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scansim/catalog.hpp"

namespace scansim {

inline constexpr double kMinAisleWidthM = 0.9144;  // 36 in

struct WorldConfig {
  double aisle_width_m = 1.0;
  int num_aisles = 10;
  int columns_per_side = 15;
  int shelves_per_column = 7;
  double shelf_width_m = 0.9;
  double shelf_pitch_m = 0.35;
  // Slots per shelf; every shelf gets round(books_per_shelf_mean) slots.
  double books_per_shelf_mean = 25.0;
  double p_absent = 0.05;
  double p_swap = 0.02;
  double degradation_mean = 0.3;
  double degradation_concentration = 8.0;
  double advance_m = 0.3;
  double camera_coverage_m = 0.6;
};

void validate(const WorldConfig& cfg);

struct Slot {
  int aisle = 0;
  int side = 0;  // 0 = left (-y), 1 = right (+y)
  int column = 0;
  int shelf = 0;  // level, 0 = bottom
  int position = 0;

  bool operator==(const Slot&) const = default;
};

struct BookInstance {
  std::string book_id;
  std::size_t record_index = 0;  // into catalog.records()
  Slot slot;
  double degradation = 0.0;  // 0 pristine, 1 unreadable
};

struct ScanWindow {
  int aisle = 0;
  int side = 0;
  int column = 0;  // column containing x_lo
  int shelf = 0;
  double x_lo = 0.0;
  double x_hi = 0.0;

  // Stable identity used for dataset keys and held-out bookkeeping.
  std::string key() const;
  bool operator==(const ScanWindow&) const = default;
};

struct ShelfId {
  int aisle = 0;
  int side = 0;
  int column = 0;
  int shelf = 0;

  auto operator<=>(const ShelfId&) const = default;
};

class ShelfWorld {
 public:
  const WorldConfig& config() const { return config_; }
  const Catalog& catalog() const { return *catalog_; }
  std::uint64_t seed() const { return seed_; }

  // Placed instances in slot order.
  const std::vector<BookInstance>& instances() const { return instances_; }

  int slots_per_shelf() const { return slots_per_shelf_; }
  double side_length_m() const { return config_.columns_per_side * config_.shelf_width_m; }
  double column_height_m() const { return config_.shelves_per_column * config_.shelf_pitch_m; }
  double shelf_height_m(int level) const { return level * config_.shelf_pitch_m; }
  double column_x_lo(int column) const { return column * config_.shelf_width_m; }
  double slot_center_x(const Slot& s) const;
  std::size_t shelf_count() const;
  std::size_t shelf_index(const ShelfId& id) const;

  // Instances of one shelf, left to right.
  std::span<const BookInstance> shelf_instances(const ShelfId& id) const;

  // Catalog section associated with a window: the section holding most of
  // the slotted books the window covers (absent books included), falling
  // back to the closest slotted book on the same side.
  std::string section_for(const ScanWindow& w) const;

  // Number of slots whose record was absent-perturbed.
  std::size_t absent_count() const { return absent_; }

 private:
  friend ShelfWorld build_world(const Catalog&, const WorldConfig&, std::uint64_t);

  WorldConfig config_;
  const Catalog* catalog_ = nullptr;
  std::uint64_t seed_ = 0;
  int slots_per_shelf_ = 0;
  std::vector<BookInstance> instances_;
  std::vector<std::size_t> shelf_begin_;  // shelf_count + 1 offsets into instances_
  // Record index per slot in layout order, or npos when the slot is empty.
  std::vector<std::size_t> slot_record_;
  std::size_t absent_ = 0;
};

// The catalog must outlive the world.
ShelfWorld build_world(const Catalog& catalog, const WorldConfig& cfg, std::uint64_t seed);

void check_bounds(const ShelfWorld& world, const ScanWindow& w);

// Instances whose slot center lies in [x_lo, x_hi), left to right.
std::vector<BookInstance> ground_truth(const ShelfWorld& world, const ScanWindow& w);

// One window per shelf level per base stop, in (aisle, side, stop,
// level bottom-to-top) order. Stops are advance_m apart.
std::vector<ScanWindow> enumerate_windows(const ShelfWorld& world);
std::size_t stops_per_side(const ShelfWorld& world);

// Shelves reserved for evaluation and the hand-labeled-style windows over
// them. Windows lie inside one column so they see only held-out books.
struct HeldOut {
  std::vector<ShelfId> shelves;
  std::vector<ScanWindow> windows;

  bool overlaps(const ScanWindow& w, double shelf_width_m) const;
};

HeldOut reserve_eval_shelves(const ShelfWorld& world, int num_shelves, int num_windows);

void write_world_json(const ShelfWorld& world, std::ostream& out);

}  // namespace scansim
