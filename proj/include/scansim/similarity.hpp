#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scansim/catalog.hpp"

namespace scansim {

// Total matched characters of the Ratcliff-Obershelp decomposition: take
// the longest common block (earliest in a, then earliest in b), recurse on
// both sides. No junk heuristics.
std::size_t gestalt_matches(std::u32string_view a, std::u32string_view b);

// 2M / (|a| + |b|); 1.0 when both are empty. Strings are compared by code
// point, so UTF-8 input is decoded first.
double gestalt_similarity(std::u32string_view a, std::u32string_view b);
double gestalt_similarity(std::string_view a, std::string_view b);

// Cheap upper bound on gestalt_similarity from the character multisets.
// `a` and `b` must be sorted.
double multiset_bound(std::u32string_view sorted_a, std::u32string_view sorted_b);

// For every candidate, the index of the other candidate whose title is most
// similar (ties to the lower index), or npos when there is none. Rows are
// independent, so the parallel kernel must agree with the serial one.
std::vector<std::size_t> nearest_title_table(std::span<const BookRecord> candidates);
std::vector<std::size_t> nearest_title_table_serial(std::span<const BookRecord> candidates);

// Per-section cache of nearest_title_table, keyed by section id. Not
// thread-safe; one instance per deployment loop.
class SubstitutionIndex {
 public:
  explicit SubstitutionIndex(const Catalog& catalog) : catalog_(&catalog) {}

  const std::vector<std::size_t>& table(const std::string& section_id);

 private:
  const Catalog* catalog_;
  std::unordered_map<std::string, std::vector<std::size_t>> tables_;
};

}  // namespace scansim
