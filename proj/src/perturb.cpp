/*
 * Copyright 2026 The Voidscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <array>
#include <cctype>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "voidscope/error.hpp"
#include "voidscope/ingest.hpp"
#include "voidscope/text.hpp"

namespace voidscope {

namespace {

const std::unordered_map<std::string, std::string>& Irregulars() {
  static const std::unordered_map<std::string, std::string> map = {
      {"child", "children"}, {"man", "men"},       {"woman", "women"},
      {"person", "people"},  {"mouse", "mice"},    {"goose", "geese"},
      {"foot", "feet"},      {"tooth", "teeth"},   {"ox", "oxen"},
      {"louse", "lice"},     {"leaf", "leaves"},   {"wolf", "wolves"},
      {"knife", "knives"},   {"life", "lives"},    {"wife", "wives"},
      {"half", "halves"},    {"shelf", "shelves"}, {"loaf", "loaves"},
      {"thief", "thieves"},  {"calf", "calves"},   {"elf", "elves"},
      {"potato", "potatoes"}, {"tomato", "tomatoes"}, {"hero", "heroes"},
      {"echo", "echoes"},    {"veto", "vetoes"},   {"torpedo", "torpedoes"},
  };
  return map;
}

const std::unordered_set<std::string>& Uncountables() {
  static const std::unordered_set<std::string> set = {
      "sheep", "deer", "fish", "series", "species", "news", "aircraft",
      "moose", "swine", "information", "evidence", "money", "police", "data",
      "media", "equipment", "software", "covid", "children", "people", "men",
      "women", "mice", "geese", "feet", "teeth", "oxen", "lice",
  };
  return set;
}

const std::unordered_set<std::string>& Stopwords() {
  static const std::unordered_set<std::string> set = {
      "a", "an", "the", "and", "or", "but", "of", "in", "on", "at", "to",
      "for", "with", "by", "from", "about", "into", "over", "under", "is",
      "are", "was", "were", "be", "been", "vs", "not", "no", "this", "that",
      "these", "those", "it", "its", "my", "your", "our", "their", "his",
      "her", "how", "why", "what", "who", "when", "where", "do", "does",
      "did", "can", "will", "should", "would", "if", "than", "as",
  };
  return set;
}

bool IsVowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool IsAlphaWord(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
  });
}

std::string PluralizeLower(const std::string& w) {
  if (Uncountables().contains(w)) return w;
  if (auto it = Irregulars().find(w); it != Irregulars().end()) return it->second;
  const auto n = w.size();
  if (n >= 2 && w[n - 1] == 's' && !text::EndsWith(w, "ss") &&
      !text::EndsWith(w, "us") && !text::EndsWith(w, "is")) {
    return w;  // already plural
  }
  if (n >= 2 && w[n - 1] == 'y' && !IsVowel(w[n - 2])) {
    return w.substr(0, n - 1) + "ies";
  }
  if (n >= 3 && text::EndsWith(w, "is")) return w.substr(0, n - 2) + "es";
  if (text::EndsWith(w, "s") || text::EndsWith(w, "x") ||
      text::EndsWith(w, "z") || text::EndsWith(w, "ch") ||
      text::EndsWith(w, "sh")) {
    return w + "es";
  }
  return w + "s";
}

// QWERTY neighbours for typo injection.
const std::unordered_map<char, std::string_view>& KeyboardNeighbours() {
  static const std::unordered_map<char, std::string_view> map = {
      {'1', "2q"},    {'2', "13qw"},   {'3', "24we"},   {'4', "35er"},
      {'5', "46rt"},  {'6', "57ty"},   {'7', "68yu"},   {'8', "79ui"},
      {'9', "80io"},  {'0', "9op"},    {'q', "12wa"},   {'w', "qe23as"},
      {'e', "wr34sd"}, {'r', "et45df"}, {'t', "ry56fg"}, {'y', "tu67gh"},
      {'u', "yi78hj"}, {'i', "uo89jk"}, {'o', "ip90kl"}, {'p', "o0l"},
      {'a', "qwsz"},  {'s', "awedxz"}, {'d', "serfcx"}, {'f', "drtgvc"},
      {'g', "ftyhbv"}, {'h', "gyujnb"}, {'j', "huikmn"}, {'k', "jiolm"},
      {'l', "kop"},   {'z', "asx"},    {'x', "zsdc"},   {'c', "xdfv"},
      {'v', "cfgb"},  {'b', "vghn"},   {'n', "bhjm"},   {'m', "njk"},
  };
  return map;
}

double UnitDraw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string PluralizeWord(std::string_view word) {
  if (!IsAlphaWord(word)) return std::string(word);
  const std::string lower = text::ToLowerAscii(word);
  std::string plural = PluralizeLower(lower);
  if (plural == lower) return std::string(word);
  const bool all_upper = word.size() > 1 &&
                         std::all_of(word.begin(), word.end(), [](char c) {
                           return std::isupper(static_cast<unsigned char>(c));
                         });
  // Keep the caller's casing on the shared prefix.
  std::string out(word);
  std::size_t common = 0;
  while (common < lower.size() && common < plural.size() &&
         lower[common] == plural[common]) {
    ++common;
  }
  out.resize(common);
  std::string tail = plural.substr(common);
  if (all_upper) {
    for (char& c : tail) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out + tail;
}

std::string PluralizeQuery(std::string_view input) {
  // The head noun of a phrase is approximated by the last word before a
  // stopword, an operator, a quote/parenthesis boundary or the end.
  const auto pieces = text::SplitWhitespace(input);
  auto core_of = [](std::string_view piece) {
    std::size_t b = 0;
    std::size_t e = piece.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(piece[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(piece[e - 1]))) --e;
    return std::pair<std::size_t, std::size_t>(b, e);
  };
  auto is_break_word = [&](std::string_view piece) {
    const auto [b, e] = core_of(piece);
    const std::string core = text::ToLowerAscii(piece.substr(b, e - b));
    return core.empty() || Stopwords().contains(core) ||
           piece.find(':') != std::string_view::npos;
  };

  std::string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string_view piece = pieces[i];
    const std::size_t offset = static_cast<std::size_t>(piece.data() - input.data());
    out.append(input.substr(cursor, offset - cursor));
    cursor = offset + piece.size();

    const auto [b, e] = core_of(piece);
    const bool trailing_boundary = e < piece.size();
    const bool next_breaks =
        i + 1 == pieces.size() || is_break_word(pieces[i + 1]) ||
        !std::isalnum(static_cast<unsigned char>(pieces[i + 1].front()));
    const std::string_view core = piece.substr(b, e - b);
    if (!is_break_word(piece) && IsAlphaWord(core) &&
        (trailing_boundary || next_breaks)) {
      out.append(piece.substr(0, b));
      out.append(PluralizeWord(core));
      out.append(piece.substr(e));
    } else {
      out.append(piece);
    }
  }
  out.append(input.substr(cursor));
  return out;
}

std::string ToggleQuotes(std::string_view input) {
  const std::string_view s = text::TrimAscii(input);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return std::string(s.substr(1, s.size() - 2));
  }
  return "\"" + std::string(s) + "\"";
}

std::string InjectTypos(std::string_view input, double probability,
                        std::uint64_t seed) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "typo probability must be in [0,1]");
  }
  if (probability == 0.0) return std::string(input);
  std::mt19937_64 rng(seed);
  std::string out(input);
  for (char& c : out) {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto it = KeyboardNeighbours().find(lower);
    if (it == KeyboardNeighbours().end()) continue;
    if (UnitDraw(rng) >= probability) continue;
    const std::string_view options = it->second;
    char replacement = options[rng() % options.size()];
    if (std::isupper(static_cast<unsigned char>(c))) {
      replacement = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement)));
    }
    c = replacement;
  }
  return out;
}

std::vector<Query> GeneratePerturbations(const Query& query,
                                         const PerturbationSpec& spec,
                                         std::uint64_t seed) {
  std::vector<Query> out;
  if (spec.pluralize) out.push_back(NormalizeQuery(PluralizeQuery(query.text)));
  if (spec.typo_probability) {
    out.push_back(NormalizeQuery(InjectTypos(query.text, *spec.typo_probability, seed)));
  }
  if (spec.quote_toggle) out.push_back(NormalizeQuery(ToggleQuotes(query.text)));
  return out;
}

}  // namespace voidscope
