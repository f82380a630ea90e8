#pragma once

#include <random>
#include <string>
#include <vector>

#include "scansim/call_number.hpp"
#include "scansim/catalog.hpp"
#include "scansim/text.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::string digits(Rng& rng, int min_len, int max_len, bool no_trailing_zero) {
  std::string s;
  const int n = uniform(rng, min_len, max_len);
  for (int i = 0; i < n; ++i) s += static_cast<char>('0' + uniform(rng, 0, 9));
  if (no_trailing_zero) {
    while (!s.empty() && s.back() == '0') s.pop_back();
  }
  return s;
}

// Small ranges on purpose so ties and shared prefixes are common.
inline scansim::CallNumber call_number(Rng& rng) {
  static const char* kLetters[] = {"A", "B", "DS", "PL", "QA", "Z", "BX", "KZA"};
  scansim::CallNumber c;
  c.class_letters = kLetters[uniform(rng, 0, 7)];
  c.class_integer = uniform(rng, 0, 3) == 0 ? uniform(rng, 1, 9999) : uniform(rng, 1, 12);
  if (uniform(rng, 0, 1)) c.class_fraction = digits(rng, 1, 3, true);
  const int cutters = uniform(rng, 1, 2);
  for (int i = 0; i < cutters; ++i) {
    scansim::Cutter k;
    k.letter = static_cast<char>('A' + uniform(rng, 0, 3));
    k.digits = digits(rng, 1, 3, false);
    c.cutters.push_back(k);
  }
  if (uniform(rng, 0, 2) > 0) c.year = uniform(rng, 1995, 2002);
  return c;
}

// Strings over a tiny alphabet (with a CJK character) to force long
// shared blocks.
inline std::string small_alphabet_string(Rng& rng, int max_len) {
  static const std::u32string kAlpha = U"ABCD 漢";
  std::u32string s;
  const int n = uniform(rng, 0, max_len);
  for (int i = 0; i < n; ++i) s += kAlpha[uniform(rng, 0, static_cast<int>(kAlpha.size()) - 1)];
  return scansim::utf8_encode(s);
}

inline std::string perturb(Rng& rng, const std::string& s, int edits) {
  std::u32string u = scansim::utf8_decode(s);
  static const std::u32string kAlpha = U"ABCDEFGHIJ0123456789 .書";
  for (int e = 0; e < edits && !u.empty(); ++e) {
    const auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(u.size()) - 1));
    switch (uniform(rng, 0, 2)) {
      case 0: u[i] = kAlpha[uniform(rng, 0, static_cast<int>(kAlpha.size()) - 1)]; break;
      case 1: u.erase(i, 1); break;
      default: u.insert(u.begin() + static_cast<std::ptrdiff_t>(i), kAlpha[uniform(rng, 0, 5)]); break;
    }
  }
  return scansim::utf8_encode(u);
}

}  // namespace gen
