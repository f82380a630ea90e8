#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scansim/call_number.hpp"
#include "scansim/text.hpp"

namespace scansim {

enum class Status { on_shelf, checked_out, offsite };

std::string_view to_string(Status s);
Status status_from_string(std::string_view s);

struct BookRecord {
  std::string book_id;
  std::string title;
  CallNumber call_number;
  Language language = Language::en;
  Status status = Status::on_shelf;

  bool operator==(const BookRecord&) const = default;
};

// Inclusive call-number range [lo, hi].
struct Section {
  std::string id;
  CallNumber lo;
  CallNumber hi;

  bool contains(const CallNumber& c) const { return lo <= c && c <= hi; }
  bool operator==(const Section&) const = default;
};

// Records sorted by call number (ties by book_id) and partitioned by
// non-overlapping sections. Immutable once created.
class Catalog {
 public:
  Catalog() = default;

  // Sorts records and sections, then checks every invariant. Throws
  // InvalidConfig on duplicate ids, overlapping sections or a record that
  // no section covers.
  static Catalog create(std::vector<BookRecord> records,
                        std::vector<Section> sections);

  const std::vector<BookRecord>& records() const { return records_; }
  const std::vector<Section>& sections() const { return sections_; }
  std::size_t size() const { return records_.size(); }

  // Records inside the section range, in catalog order and regardless of
  // status. The slice is contiguous in records(). Throws UnknownSection.
  std::span<const BookRecord> candidate_set(std::string_view section_id) const;

  // Catalog index of the first record of candidate_set(section_id).
  std::size_t section_offset(std::string_view section_id) const;

  const Section* find_section(std::string_view section_id) const;
  const Section* section_of(const CallNumber& c) const;

  std::optional<std::size_t> index_of(std::string_view book_id) const;
  const BookRecord& at(std::size_t i) const { return records_[i]; }

 private:
  std::pair<std::size_t, std::size_t> section_bounds(const Section& s) const;

  std::vector<BookRecord> records_;
  std::vector<Section> sections_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct CatalogConfig {
  int num_books = 52000;
  int num_sections = 100;
  // zh, ja, ko, en
  std::array<double, 4> language_mix = {0.55, 0.2, 0.15, 0.1};
  double p_checked_out = 0.05;
  double p_offsite = 0.02;
};

void validate(const CatalogConfig& cfg);

Catalog generate_catalog(const CatalogConfig& cfg, std::uint64_t seed);

// JSON Lines: line 1 {"sections":[{id, lo, hi}]}, then one record per line.
void write_catalog_jsonl(const Catalog& catalog, std::ostream& out);
Catalog read_catalog_jsonl(std::istream& in);

}  // namespace scansim
