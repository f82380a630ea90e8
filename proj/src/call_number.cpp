#include "scansim/call_number.hpp"

#include <cctype>
#include <cstdlib>

#include "scansim/error.hpp"

namespace scansim {
namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t'; }

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }
  bool done() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }

  std::string take_while(bool (*pred)(char)) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && pred(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw MalformedCallNumber(pos_, reason);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

Cutter read_cutter(Scanner& s) {
  if (!is_upper(s.peek())) s.fail("expected cutter letter");
  Cutter c;
  c.letter = s.peek();
  s.advance();
  c.digits = s.take_while(is_digit);
  if (c.digits.empty()) s.fail("cutter needs at least one digit");
  return c;
}

std::strong_ordering compare_digits(const std::string& a,
                                    const std::string& b) {
  const int r = a.compare(b);
  if (r < 0) return std::strong_ordering::less;
  if (r > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

double CallNumber::class_number() const {
  double v = class_integer;
  double scale = 0.1;
  for (char d : class_fraction) {
    v += (d - '0') * scale;
    scale /= 10.0;
  }
  return v;
}

CallNumber parse_call_number(std::string_view text) {
  Scanner s(text);
  CallNumber c;

  s.skip_space();
  if (s.done()) s.fail("empty call number");
  c.class_letters = s.take_while(is_upper);
  if (c.class_letters.empty()) s.fail("expected class letters");
  if (c.class_letters.size() > 3) s.fail("more than three class letters");

  s.skip_space();
  const std::size_t number_pos = s.pos();
  const std::string integer = s.take_while(is_digit);
  if (integer.empty()) s.fail("expected class number");
  if (integer.size() > 4) throw MalformedCallNumber(number_pos, "class number above 9999");
  c.class_integer = std::atoi(integer.c_str());
  if (c.class_integer < 1) throw MalformedCallNumber(number_pos, "class number must be positive");

  if (s.peek() == '.' && is_digit(s.peek(1))) {
    s.advance();
    c.class_fraction = s.take_while(is_digit);
    while (!c.class_fraction.empty() && c.class_fraction.back() == '0') {
      c.class_fraction.pop_back();
    }
  }

  s.skip_space();
  if (s.peek() == '.') {
    s.advance();
    s.skip_space();
    c.cutters.push_back(read_cutter(s));
    s.skip_space();
    if (is_upper(s.peek())) c.cutters.push_back(read_cutter(s));
  }

  // A year must be separated by whitespace; digits glued to a cutter were
  // already consumed by it.
  s.skip_space();
  if (is_digit(s.peek())) {
    const std::size_t year_pos = s.pos();
    const std::string year = s.take_while(is_digit);
    if (year.size() != 4) throw MalformedCallNumber(year_pos, "year must have four digits");
    c.year = std::atoi(year.c_str());
  }

  s.skip_space();
  if (!s.done()) s.fail("unexpected trailing text");
  return c;
}

std::string format_call_number(const CallNumber& c) {
  std::string out = c.class_letters;
  out += std::to_string(c.class_integer);
  if (!c.class_fraction.empty()) {
    out += '.';
    out += c.class_fraction;
  }
  for (std::size_t i = 0; i < c.cutters.size(); ++i) {
    out += i == 0 ? " ." : " ";
    out += c.cutters[i].letter;
    out += c.cutters[i].digits;
  }
  if (c.year) {
    out += ' ';
    out += std::to_string(*c.year);
  }
  return out;
}

std::strong_ordering compare_call_numbers(const CallNumber& a,
                                          const CallNumber& b) {
  if (auto r = compare_digits(a.class_letters, b.class_letters); r != 0) return r;
  if (auto r = a.class_integer <=> b.class_integer; r != 0) return r;
  if (auto r = compare_digits(a.class_fraction, b.class_fraction); r != 0) return r;
  const std::size_t n = std::min(a.cutters.size(), b.cutters.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto r = a.cutters[i].letter <=> b.cutters[i].letter; r != 0) return r;
    if (auto r = compare_digits(a.cutters[i].digits, b.cutters[i].digits); r != 0) return r;
  }
  if (auto r = a.cutters.size() <=> b.cutters.size(); r != 0) return r;
  // A missing year sorts before any year.
  if (a.year.has_value() != b.year.has_value()) {
    return a.year.has_value() ? std::strong_ordering::greater
                              : std::strong_ordering::less;
  }
  if (a.year) return *a.year <=> *b.year;
  return std::strong_ordering::equal;
}

void validate(const CallNumber& c) {
  if (c.class_letters.empty() || c.class_letters.size() > 3) {
    throw InvalidConfig("class_letters", "expected 1-3 letters");
  }
  for (char l : c.class_letters) {
    if (!is_upper(l)) throw InvalidConfig("class_letters", "expected uppercase letters");
  }
  if (c.class_integer < 1 || c.class_integer > 9999) {
    throw InvalidConfig("class_number", "integer part must be in 1..9999");
  }
  for (char d : c.class_fraction) {
    if (!is_digit(d)) throw InvalidConfig("class_number", "fraction must be digits");
  }
  if (!c.class_fraction.empty() && c.class_fraction.back() == '0') {
    throw InvalidConfig("class_number", "fraction has a trailing zero");
  }
  if (c.cutters.size() > 2) throw InvalidConfig("cutters", "at most two cutters");
  for (const auto& cut : c.cutters) {
    if (!is_upper(cut.letter) || cut.digits.empty()) {
      throw InvalidConfig("cutters", "cutter needs a letter and digits");
    }
    for (char d : cut.digits) {
      if (!is_digit(d)) throw InvalidConfig("cutters", "cutter digits must be digits");
    }
  }
  if (c.year && (*c.year < 1000 || *c.year > 9999)) {
    throw InvalidConfig("year", "year must have four digits");
  }
}

}  // namespace scansim
