#include "scansim/text.hpp"

#include <array>

#include "scansim/error.hpp"

namespace scansim {
namespace {

constexpr std::array<std::string_view, 48> kZh = {
    "中国", "历史", "文学", "研究", "思想", "社会", "经济", "政治", "文化", "哲学",
    "佛教", "艺术", "语言", "近代", "古代", "地方", "民族", "宗教", "诗歌", "小说",
    "明清", "唐宋", "汉代", "史料", "考古", "战争", "城市", "农村", "教育", "法律",
    "外交", "制度", "传统", "变迁", "论集", "选集", "全集", "通史", "概论", "新编",
    "丛书", "资料", "年谱", "注释", "比较", "发展", "问题", "人物"};

constexpr std::array<std::string_view, 36> kJa = {
    "日本", "歴史", "文学", "研究", "思想", "社会", "経済", "政治", "文化",
    "近代", "古典", "物語", "仏教", "美術", "言語", "地域", "江戸", "明治",
    "昭和", "戦後", "の", "と", "における", "論", "史", "集", "入門", "講座",
    "事典", "資料", "時代", "世界", "東アジア", "民俗", "芸能", "都市"};

constexpr std::array<std::string_view, 32> kKo = {
    "한국", "역사", "문학", "연구", "사상", "사회", "경제", "정치",
    "문화", "근대", "고대", "조선", "고려", "불교", "미술", "언어",
    "지역", "민족", "종교", "시집", "소설", "전집", "자료", "의",
    "과", "론", "사", "입문", "세계", "동아시아", "변동", "인물"};

constexpr std::array<std::string_view, 48> kEn = {
    "history", "of", "the", "chinese", "japanese", "korean", "literature",
    "studies", "in", "modern", "early", "culture", "society", "economy",
    "politics", "religion", "buddhism", "art", "language", "empire", "dynasty",
    "late", "imperial", "china", "japan", "korea", "east", "asia", "poetry",
    "fiction", "thought", "state", "and", "reform", "trade", "war", "city",
    "rural", "family", "law", "text", "essays", "collected", "works", "new",
    "perspectives", "sources", "readings"};

constexpr std::u32string_view kZhAlphabet =
    U"中国历史文学研究思想社会经济政治化哲佛教艺术语言近代古地方民族宗诗歌小说";
constexpr std::u32string_view kJaAlphabet =
    U"日本歴史文学研究思想社会経済政治化近代古典物語仏教美術言語のとにおける論";
constexpr std::u32string_view kKoAlphabet =
    U"한국역사문학연구사상회경제정치화근대고조선려불교미술언어지민족종의과론";
constexpr std::u32string_view kEnAlphabet = U"abcdefghijklmnopqrstuvwxyz";

}  // namespace

std::string_view to_string(Language l) {
  switch (l) {
    case Language::zh: return "zh";
    case Language::ja: return "ja";
    case Language::ko: return "ko";
    case Language::en: return "en";
  }
  return "en";
}

Language language_from_string(std::string_view s) {
  if (s == "zh") return Language::zh;
  if (s == "ja") return Language::ja;
  if (s == "ko") return Language::ko;
  if (s == "en") return Language::en;
  throw Error("unknown language '" + std::string(s) + "'");
}

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(U'�');
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(U'�');
      break;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    out.push_back(ok ? cp : U'�');
    i += ok ? len : 1;
  }
  return out;
}

std::string utf8_encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::span<const std::string_view> title_tokens(Language l) {
  switch (l) {
    case Language::zh: return kZh;
    case Language::ja: return kJa;
    case Language::ko: return kKo;
    case Language::en: return kEn;
  }
  return kEn;
}

bool title_uses_spaces(Language l) { return l == Language::en || l == Language::ko; }

std::u32string_view confusable_alphabet(Language l) {
  switch (l) {
    case Language::zh: return kZhAlphabet;
    case Language::ja: return kJaAlphabet;
    case Language::ko: return kKoAlphabet;
    case Language::en: return kEnAlphabet;
  }
  return kEnAlphabet;
}

}  // namespace scansim
