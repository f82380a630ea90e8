#pragma once

#include <span>
#include <string>
#include <string_view>

namespace scansim {

enum class Language { zh, ja, ko, en };

std::string_view to_string(Language l);
Language language_from_string(std::string_view s);

// Code-point level UTF-8 conversion. Invalid bytes decode to U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

// Bundled word lists used to compose synthetic titles.
std::span<const std::string_view> title_tokens(Language l);
bool title_uses_spaces(Language l);

// Characters a degraded reading may turn into, per script.
std::u32string_view confusable_alphabet(Language l);

}  // namespace scansim
