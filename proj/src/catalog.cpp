#include "scansim/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>

#include "scansim/error.hpp"
#include "scansim/json_io.hpp"
#include "scansim/rng.hpp"

namespace scansim {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::on_shelf: return "on_shelf";
    case Status::checked_out: return "checked_out";
    case Status::offsite: return "offsite";
  }
  return "on_shelf";
}

Status status_from_string(std::string_view s) {
  if (s == "on_shelf") return Status::on_shelf;
  if (s == "checked_out") return Status::checked_out;
  if (s == "offsite") return Status::offsite;
  throw Error("unknown status '" + std::string(s) + "'");
}

namespace {

bool record_less(const BookRecord& a, const BookRecord& b) {
  const auto c = compare_call_numbers(a.call_number, b.call_number);
  if (c != 0) return c < 0;
  return a.book_id < b.book_id;
}

}  // namespace

Catalog Catalog::create(std::vector<BookRecord> records,
                        std::vector<Section> sections) {
  Catalog cat;
  std::sort(records.begin(), records.end(), record_less);
  std::sort(sections.begin(), sections.end(),
            [](const Section& a, const Section& b) { return a.lo < b.lo; });

  std::set<std::string> section_ids;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto& s = sections[i];
    if (!section_ids.insert(s.id).second) {
      throw InvalidConfig("sections", "duplicate section id '" + s.id + "'");
    }
    if (s.hi < s.lo) throw InvalidConfig("sections", "section '" + s.id + "' has lo > hi");
    if (i > 0 && !(sections[i - 1].hi < s.lo)) {
      throw InvalidConfig("sections", "section '" + s.id + "' overlaps '" +
                                          sections[i - 1].id + "'");
    }
  }

  cat.by_id_.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].title.empty()) {
      throw InvalidConfig("records", "empty title for '" + records[i].book_id + "'");
    }
    if (!cat.by_id_.emplace(records[i].book_id, i).second) {
      throw InvalidConfig("records", "duplicate book_id '" + records[i].book_id + "'");
    }
  }
  cat.records_ = std::move(records);
  cat.sections_ = std::move(sections);

  for (const auto& r : cat.records_) {
    if (cat.section_of(r.call_number) == nullptr) {
      throw InvalidConfig("sections", "record '" + r.book_id +
                                          "' is not covered by any section");
    }
  }
  return cat;
}

std::pair<std::size_t, std::size_t> Catalog::section_bounds(const Section& s) const {
  auto lo = std::lower_bound(records_.begin(), records_.end(), s.lo,
                             [](const BookRecord& r, const CallNumber& c) {
                               return r.call_number < c;
                             });
  auto hi = std::upper_bound(lo, records_.end(), s.hi,
                             [](const CallNumber& c, const BookRecord& r) {
                               return c < r.call_number;
                             });
  return {static_cast<std::size_t>(lo - records_.begin()),
          static_cast<std::size_t>(hi - records_.begin())};
}

const Section* Catalog::find_section(std::string_view section_id) const {
  for (const auto& s : sections_) {
    if (s.id == section_id) return &s;
  }
  return nullptr;
}

const Section* Catalog::section_of(const CallNumber& c) const {
  auto it = std::upper_bound(sections_.begin(), sections_.end(), c,
                             [](const CallNumber& v, const Section& s) {
                               return v < s.lo;
                             });
  if (it == sections_.begin()) return nullptr;
  --it;
  return it->contains(c) ? &*it : nullptr;
}

std::span<const BookRecord> Catalog::candidate_set(std::string_view section_id) const {
  const Section* s = find_section(section_id);
  if (s == nullptr) throw UnknownSection(std::string(section_id));
  const auto [lo, hi] = section_bounds(*s);
  return std::span<const BookRecord>(records_).subspan(lo, hi - lo);
}

std::size_t Catalog::section_offset(std::string_view section_id) const {
  const Section* s = find_section(section_id);
  if (s == nullptr) throw UnknownSection(std::string(section_id));
  return section_bounds(*s).first;
}

std::optional<std::size_t> Catalog::index_of(std::string_view book_id) const {
  auto it = by_id_.find(std::string(book_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

void validate(const CatalogConfig& cfg) {
  if (cfg.num_books < 1) throw InvalidConfig("catalog.num_books", "must be >= 1");
  if (cfg.num_sections < 1) throw InvalidConfig("catalog.num_sections", "must be >= 1");
  if (cfg.num_sections > cfg.num_books) {
    throw InvalidConfig("catalog.num_sections", "must not exceed num_books");
  }
  double sum = 0.0;
  for (double p : cfg.language_mix) {
    if (p < 0.0) throw InvalidConfig("catalog.language_mix", "negative weight");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidConfig("catalog.language_mix", "weights must sum to 1");
  }
  if (cfg.p_checked_out < 0.0 || cfg.p_offsite < 0.0 ||
      cfg.p_checked_out + cfg.p_offsite > 1.0) {
    throw InvalidConfig("catalog.p_checked_out", "status probabilities out of range");
  }
}

namespace {

// Classes an East Asian collection draws most of its holdings from.
constexpr std::array<std::string_view, 16> kClasses = {
    "B", "BL", "BQ", "D", "DS", "G", "GR", "HC", "HN", "HQ", "JQ", "K", "N",
    "NK", "PL", "Z"};

std::string random_digits(Rng& rng, int min_len, int max_len) {
  std::uniform_int_distribution<int> len_d(min_len, max_len);
  std::uniform_int_distribution<int> digit(0, 9);
  std::uniform_int_distribution<int> nonzero(1, 9);
  const int len = len_d(rng);
  std::string s;
  for (int i = 0; i < len; ++i) s += static_cast<char>('0' + digit(rng));
  // No trailing zero keeps cutters free of 0.5 / 0.50 lookalikes.
  s.back() = static_cast<char>('0' + nonzero(rng));
  return s;
}

CallNumber random_call_number(Rng& rng) {
  std::uniform_int_distribution<std::size_t> cls(0, kClasses.size() - 1);
  std::uniform_int_distribution<int> number(1, 9999);
  std::uniform_int_distribution<int> letter(0, 25);
  std::uniform_int_distribution<int> year(1900, 2024);
  std::bernoulli_distribution has_fraction(0.2);
  std::bernoulli_distribution has_second(0.3);
  std::bernoulli_distribution has_year(0.7);

  CallNumber c;
  c.class_letters = std::string(kClasses[cls(rng)]);
  c.class_integer = number(rng);
  if (has_fraction(rng)) c.class_fraction = random_digits(rng, 1, 2);
  c.cutters.push_back({static_cast<char>('A' + letter(rng)), random_digits(rng, 1, 3)});
  if (has_second(rng)) {
    c.cutters.push_back({static_cast<char>('A' + letter(rng)), random_digits(rng, 1, 2)});
  }
  if (has_year(rng)) c.year = year(rng);
  return c;
}

std::string random_title(Rng& rng, Language lang) {
  const auto tokens = title_tokens(lang);
  std::uniform_int_distribution<std::size_t> pick(0, tokens.size() - 1);
  std::uniform_int_distribution<int> count(2, 4);
  const int n = count(rng);
  std::string title;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && title_uses_spaces(lang)) title += ' ';
    title += tokens[pick(rng)];
  }
  return title;
}

}  // namespace

Catalog generate_catalog(const CatalogConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Rng rng(derive_seed(seed, Stream::kCatalog));

  std::set<CallNumber> numbers;
  while (numbers.size() < static_cast<std::size_t>(cfg.num_books)) {
    numbers.insert(random_call_number(rng));
  }

  std::discrete_distribution<int> lang_d(cfg.language_mix.begin(), cfg.language_mix.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<BookRecord> records;
  records.reserve(numbers.size());
  std::size_t index = 0;
  char id[32];
  for (const auto& cn : numbers) {
    BookRecord r;
    std::snprintf(id, sizeof(id), "bk%06zu", index++);
    r.book_id = id;
    r.call_number = cn;
    r.language = static_cast<Language>(lang_d(rng));
    r.title = random_title(rng, r.language);
    const double u = unit(rng);
    if (u < cfg.p_checked_out) {
      r.status = Status::checked_out;
    } else if (u < cfg.p_checked_out + cfg.p_offsite) {
      r.status = Status::offsite;
    }
    records.push_back(std::move(r));
  }

  std::vector<Section> sections;
  const std::size_t n = records.size();
  const std::size_t k = static_cast<std::size_t>(cfg.num_sections);
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t first = s * n / k;
    const std::size_t last = (s + 1) * n / k - 1;
    std::snprintf(id, sizeof(id), "SEC%03zu", s);
    sections.push_back({id, records[first].call_number, records[last].call_number});
  }
  return Catalog::create(std::move(records), std::move(sections));
}

void write_catalog_jsonl(const Catalog& catalog, std::ostream& out) {
  nlohmann::ordered_json header;
  header["sections"] = nlohmann::ordered_json::array();
  for (const auto& s : catalog.sections()) header["sections"].push_back(to_json(s));
  out << header.dump() << '\n';
  for (const auto& r : catalog.records()) out << to_json(r).dump() << '\n';
}

Catalog read_catalog_jsonl(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<Section> sections;
  std::vector<BookRecord> records;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!have_header) {
        if (!j.contains("sections")) throw Error("first line must hold the sections header");
        for (const auto& s : j.at("sections")) sections.push_back(section_from_json(s));
        have_header = true;
      } else {
        records.push_back(book_from_json(j));
      }
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError(line_no, e.what());
    }
  }
  if (!have_header) throw FormatError(line_no, "missing sections header");
  return Catalog::create(std::move(records), std::move(sections));
}

}  // namespace scansim
