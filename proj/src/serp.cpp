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

#include "voidscope/serp.hpp"

#include <array>
#include <set>

#include "voidscope/error.hpp"
#include "voidscope/html.hpp"
#include "voidscope/text.hpp"
#include "voidscope/url.hpp"

namespace voidscope {

namespace {

constexpr std::array<std::string_view, 5> kResultTypeNames = {
    "organic", "news", "video", "ad", "other"};
constexpr std::array<std::string_view, 7> kBannerTypeNames = {
    "none",
    "low_quality",
    "low_relevance_many",
    "low_relevance_any",
    "low_relevance_no_matches",
    "rapidly_changing",
    "other",
};

constexpr std::string_view kTruncationPhrase = "was ignored because we limit queries to 32 words";

// Lower-case, curly apostrophes folded, "are not" contracted.
std::string NormalizePhrase(std::string_view s) {
  std::string out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    char32_t cp = text::NextCodePoint(s, pos);
    if (cp == 0x2019 || cp == 0x2018 || cp == 0x02BC) cp = '\'';
    text::AppendUtf8(out, cp);
  }
  out = text::ToLowerAscii(text::CollapseWhitespace(out));
  for (std::size_t at = out.find("are not "); at != std::string::npos;
       at = out.find("are not ", at)) {
    out.replace(at, 8, "aren't ");
  }
  return out;
}

bool Contains(std::string_view hay, std::string_view needle) {
  return hay.find(needle) != std::string_view::npos;
}

bool IsSeparator(char32_t cp) {
  return cp == ',' || cp == '.' || cp == ' ' || cp == 0xA0 || cp == 0x2009 ||
         cp == 0x202F || cp == '\'';
}

bool IsDigit(char32_t cp) { return cp >= '0' && cp <= '9'; }

struct NumberSpan {
  std::int64_t value;
  std::size_t end;  // index after the number in the u32 string
};

std::vector<NumberSpan> GroupedNumbers(const std::u32string& s) {
  std::vector<NumberSpan> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!IsDigit(s[i]) || (i > 0 && IsDigit(s[i - 1]))) {
      ++i;
      continue;
    }
    std::string digits;
    while (i < s.size() && IsDigit(s[i])) digits += static_cast<char>(s[i++]);
    // A separator continues the number only when exactly three digits follow.
    while (i + 3 < s.size() && IsSeparator(s[i]) && IsDigit(s[i + 1]) &&
           IsDigit(s[i + 2]) && IsDigit(s[i + 3]) &&
           (i + 4 >= s.size() || !IsDigit(s[i + 4]))) {
      for (int k = 1; k <= 3; ++k) digits += static_cast<char>(s[i + k]);
      i += 4;
    }
    if (digits.size() > 18) digits.resize(18);
    out.push_back({std::stoll(digits), i});
  }
  return out;
}

bool IsAbsoluteHttp(std::string_view href) {
  return text::StartsWith(text::ToLowerAscii(href.substr(0, 8)), "http://") ||
         text::StartsWith(text::ToLowerAscii(href.substr(0, 8)), "https://");
}

// Resolves an anchor target: absolute links as-is, "/url?q=" redirects to
// their target.
std::optional<std::string> ResolveHref(std::string_view href) {
  if (IsAbsoluteHttp(href)) return std::string(href);
  if (href.starts_with("/url?")) {
    try {
      const Url u = Url::Parse("https://www.google.com" + std::string(href));
      for (const char* key : {"q", "url"}) {
        if (auto target = u.QueryParam(key); target && IsAbsoluteHttp(*target)) {
          return target;
        }
      }
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

bool IsElement(const html::Node& n, std::string_view tag) {
  return n.is_element() && n.tag == tag;
}

}  // namespace

std::string_view ResultTypeName(ResultType type) {
  return kResultTypeNames[static_cast<int>(type)];
}

std::optional<ResultType> ResultTypeFromName(std::string_view name) {
  for (std::size_t i = 0; i < kResultTypeNames.size(); ++i) {
    if (kResultTypeNames[i] == name) return static_cast<ResultType>(i);
  }
  return std::nullopt;
}

std::string_view BannerTypeName(BannerType type) {
  return kBannerTypeNames[static_cast<int>(type)];
}

std::optional<BannerType> BannerTypeFromName(std::string_view name) {
  for (std::size_t i = 0; i < kBannerTypeNames.size(); ++i) {
    if (kBannerTypeNames[i] == name) return static_cast<BannerType>(i);
  }
  return std::nullopt;
}

bool IsLowRelevance(BannerType type) {
  return type == BannerType::kLowRelevanceMany || type == BannerType::kLowRelevanceAny ||
         type == BannerType::kLowRelevanceNoMatches;
}

BannerType ClassifyBanner(std::string_view banner_text) {
  const std::string t = NormalizePhrase(banner_text);
  if (t.empty()) return BannerType::kNone;
  if (Contains(t, "changing quickly")) return BannerType::kRapidlyChanging;
  if (Contains(t, "did not match any documents")) return BannerType::kLowRelevanceNoMatches;
  if (Contains(t, "aren't many great matches")) return BannerType::kLowRelevanceMany;
  if (Contains(t, "aren't any great matches")) return BannerType::kLowRelevanceAny;
  if (Contains(t, "aren't many great results") || Contains(t, "aren't any great results") ||
      Contains(t, "may not have reliable information")) {
    return BannerType::kLowQuality;
  }
  return BannerType::kOther;
}

std::vector<std::string> SerpRecord::RankedUrls() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const SearchResult& r : results) {
    if (r.result_type == ResultType::kAd) continue;
    if (seen.insert(r.url).second) out.push_back(r.url);
  }
  return out;
}

std::size_t SerpRecord::organic_count() const {
  std::size_t n = 0;
  for (const SearchResult& r : results) n += r.result_type != ResultType::kAd;
  return n;
}

std::optional<std::int64_t> ParseResultCount(std::string_view text_in) {
  const std::u32string s = text::DecodeUtf8(text_in);
  const auto numbers = GroupedNumbers(s);
  if (numbers.empty()) return std::nullopt;
  // "Page 2 of about 1,230 results": prefer the number right before "result".
  std::string lower = text::ToLowerAscii(text_in);
  const std::u32string ls = text::DecodeUtf8(lower);
  const std::u32string word = U"result";
  const auto at = ls.find(word);
  if (at != std::u32string::npos) {
    std::optional<std::int64_t> best;
    for (const auto& n : numbers) {
      if (n.end <= at) best = n.value;
    }
    if (best) return best;
  }
  return numbers.front().value;
}

SerpRecord ParseSerp(std::string_view page) {
  const html::Document doc = html::Parse(page);
  const html::Node& root = *doc.root;
  const html::Node* search = html::FindById(root, "search");
  const html::Node* rso = html::FindById(root, "rso");
  const html::Node* stats = html::FindById(root, "result-stats");
  const html::Node* topstuff = html::FindById(root, "topstuff");
  if (!search && !rso && !stats && !topstuff) {
    std::string why = "no result-page landmarks (#search, #rso, #result-stats, #topstuff)";
    if (html::FindById(root, "captcha-form") ||
        Contains(text::ToLowerAscii(page), "unusual traffic")) {
      why = "captcha or rate-limit page";
    } else if (doc.element_count == 0) {
      why = "no markup";
    }
    throw Error(ErrorCode::kUnparseableHtml, why);
  }

  SerpRecord record;
  if (stats) record.estimated_total_results = ParseResultCount(stats->InnerText());

  if (topstuff) {
    const std::string all = text::ToLowerAscii(topstuff->InnerText());
    record.truncation_notice = Contains(all, kTruncationPhrase);
    for (const html::Node* card : html::FindAll(*topstuff, [](const html::Node& n) {
           return n.is_element() && n.HasClass("card-section");
         })) {
      // Nested card sections are covered by their outermost ancestor.
      if (html::HasAncestor(*card, [](const html::Node& n) {
            return n.is_element() && n.HasClass("card-section");
          }, topstuff)) {
        continue;
      }
      const std::string t = card->InnerText();
      if (t.empty() || Contains(text::ToLowerAscii(t), kTruncationPhrase)) continue;
      record.banner.banner_text = t;
      record.banner.banner_type = ClassifyBanner(t);
      break;
    }
  }

  auto in_container = [](const html::Node& n, std::initializer_list<std::string_view> ids) {
    return html::HasAncestor(n, [&](const html::Node& a) {
      if (!a.is_element()) return false;
      for (auto id : ids) {
        if (a.Id() == id) return true;
      }
      return false;
    });
  };
  const auto blocks = html::FindOutermost(root, [&](const html::Node& n) {
    if (!n.is_element()) return false;
    if (n.Attr("data-text-ad") && in_container(n, {"tads", "tadsb"})) return true;
    return IsElement(n, "div") && n.HasClass("g") && in_container(n, {"rso"});
  });

  for (const html::Node* block : blocks) {
    std::optional<std::string> url;
    html::FindFirst(*block, [&](const html::Node& n) {
      if (!IsElement(n, "a")) return false;
      const std::string* href = n.Attr("href");
      if (href) url = ResolveHref(*href);
      return url.has_value();
    });
    if (!url) continue;
    SearchResult result;
    try {
      result.url = CanonicalizeUrl(*url);
      result.domain = ExtractDomain(result.url);
    } catch (const Error&) {
      continue;
    }
    const html::Node* h3 = html::FindFirst(*block, [](const html::Node& n) {
      return IsElement(n, "h3");
    });
    const html::Node* heading = h3 ? h3 : html::FindFirst(*block, [](const html::Node& n) {
      const std::string* role = n.is_element() ? n.Attr("role") : nullptr;
      return role && *role == "heading";
    });
    if (heading) result.title = heading->InnerText();

    auto has_class_up = [&](std::string_view cls) {
      return block->HasClass(cls) || html::HasAncestor(*block, [&](const html::Node& a) {
               return a.is_element() && a.HasClass(cls);
             });
    };
    if (block->Attr("data-text-ad")) {
      result.result_type = ResultType::kAd;
    } else if (has_class_up("news") ||
               html::HasAncestor(*block, [](const html::Node& a) {
                 return IsElement(a, "g-section-with-header");
               })) {
      result.result_type = ResultType::kNews;
    } else if (has_class_up("video") || has_class_up("video-voyager")) {
      result.result_type = ResultType::kVideo;
    } else if (!h3) {
      result.result_type = ResultType::kOther;
    }
    result.rank = static_cast<int>(record.results.size()) + 1;
    record.results.push_back(std::move(result));
  }
  return record;
}

}  // namespace voidscope
