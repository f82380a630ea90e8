#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scansim {

// A cutter such as ".C345": one letter plus digits read as a decimal
// fraction. Digit strings compare lexicographically, which matches
// decimal-fraction order ("5" < "52" < "6") and breaks the 0.5 == 0.50 tie
// by length so that equality stays structural.
struct Cutter {
  char letter = 'A';
  std::string digits;

  bool operator==(const Cutter&) const = default;
};

// Simplified Library of Congress call number:
//   LETTERS NUMBER [ "." CUTTER [ CUTTER ] ] [ YEAR ]
struct CallNumber {
  std::string class_letters;   // 1-3 uppercase letters
  int class_integer = 1;       // 1..9999
  std::string class_fraction;  // decimal digits, never a trailing zero
  std::vector<Cutter> cutters; // at most two
  std::optional<int> year;     // four digits

  double class_number() const;

  bool operator==(const CallNumber&) const = default;
};

CallNumber parse_call_number(std::string_view text);
std::string format_call_number(const CallNumber& c);
std::strong_ordering compare_call_numbers(const CallNumber& a,
                                          const CallNumber& b);

inline std::strong_ordering operator<=>(const CallNumber& a,
                                        const CallNumber& b) {
  return compare_call_numbers(a, b);
}

// Throws InvalidConfig if a field is out of range. parse_call_number only
// ever returns valid values; this guards hand-built ones.
void validate(const CallNumber& c);

}  // namespace scansim
