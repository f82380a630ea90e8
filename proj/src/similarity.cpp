#include "scansim/similarity.hpp"

#include <algorithm>
#include <limits>

#include "scansim/text.hpp"

namespace scansim {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Block {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t len = 0;
};

// Longest common block of a[alo, ahi) and b[blo, bhi); earliest in a, then
// earliest in b. `row` is scratch of size |b| + 1.
Block longest_block(std::u32string_view a, std::size_t alo, std::size_t ahi,
                    std::u32string_view b, std::size_t blo, std::size_t bhi,
                    std::vector<std::size_t>& prev, std::vector<std::size_t>& cur) {
  Block best{alo, blo, 0};
  const std::size_t width = bhi - blo;
  std::fill(prev.begin(), prev.begin() + width + 1, 0);
  for (std::size_t i = alo; i < ahi; ++i) {
    cur[0] = 0;
    for (std::size_t j = blo; j < bhi; ++j) {
      const std::size_t k = (a[i] == b[j]) ? prev[j - blo] + 1 : 0;
      cur[j - blo + 1] = k;
      if (k > best.len) best = {i + 1 - k, j + 1 - k, k};
    }
    std::swap(prev, cur);
  }
  return best;
}

}  // namespace

std::size_t gestalt_matches(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  struct Range {
    std::size_t alo, ahi, blo, bhi;
  };
  std::vector<Range> todo{{0, a.size(), 0, b.size()}};
  std::size_t matched = 0;
  while (!todo.empty()) {
    const Range r = todo.back();
    todo.pop_back();
    if (r.alo >= r.ahi || r.blo >= r.bhi) continue;
    const Block blk = longest_block(a, r.alo, r.ahi, b, r.blo, r.bhi, prev, cur);
    if (blk.len == 0) continue;
    matched += blk.len;
    todo.push_back({r.alo, blk.a, r.blo, blk.b});
    todo.push_back({blk.a + blk.len, r.ahi, blk.b + blk.len, r.bhi});
  }
  return matched;
}

double gestalt_similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(gestalt_matches(a, b)) / static_cast<double>(total);
}

double gestalt_similarity(std::string_view a, std::string_view b) {
  return gestalt_similarity(utf8_decode(a), utf8_decode(b));
}

double multiset_bound(std::u32string_view a, std::u32string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 1.0;
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(total);
}

std::vector<std::size_t> nearest_title_table_serial(std::span<const BookRecord> candidates) {
  std::vector<std::u32string> titles;
  titles.reserve(candidates.size());
  for (const auto& c : candidates) titles.push_back(utf8_decode(c.title));

  std::vector<std::size_t> out(candidates.size(), kNone);
  for (std::size_t i = 0; i < titles.size(); ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j < titles.size(); ++j) {
      if (j == i) continue;
      const double s = gestalt_similarity(titles[i], titles[j]);
      if (s > best) {
        best = s;
        out[i] = j;
      }
    }
  }
  return out;
}

std::vector<std::size_t> nearest_title_table(std::span<const BookRecord> candidates) {
  const std::size_t n = candidates.size();
  std::vector<std::u32string> titles(n), sorted(n);
  for (std::size_t i = 0; i < n; ++i) {
    titles[i] = utf8_decode(candidates[i].title);
    sorted[i] = titles[i];
    std::sort(sorted[i].begin(), sorted[i].end());
  }

  std::vector<std::size_t> out(n, kNone);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double best = -1.0;
    std::size_t arg = kNone;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      // A later index can only win with a strictly higher score.
      if (multiset_bound(sorted[i], sorted[j]) <= best) continue;
      const double s = gestalt_similarity(titles[i], titles[j]);
      if (s > best) {
        best = s;
        arg = j;
      }
    }
    out[i] = arg;
  }
  return out;
}

const std::vector<std::size_t>& SubstitutionIndex::table(const std::string& section_id) {
  auto it = tables_.find(section_id);
  if (it != tables_.end()) return it->second;
  return tables_.emplace(section_id, nearest_title_table(catalog_->candidate_set(section_id)))
      .first->second;
}

}  // namespace scansim
