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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace voidscope {

enum class ResultType { kOrganic, kNews, kVideo, kAd, kOther };

std::string_view ResultTypeName(ResultType type);
std::optional<ResultType> ResultTypeFromName(std::string_view name);

struct SearchResult {
  int rank = 0;  // 1-based page order over all parsed results, ads included
  std::string url;  // canonical form
  std::string title;
  ResultType result_type = ResultType::kOrganic;
  std::string domain;
};

enum class BannerType {
  kNone,
  kLowQuality,
  kLowRelevanceMany,
  kLowRelevanceAny,
  kLowRelevanceNoMatches,
  kRapidlyChanging,
  kOther,  // banner markup present but the phrasing is unknown
};

std::string_view BannerTypeName(BannerType type);
std::optional<BannerType> BannerTypeFromName(std::string_view name);
bool IsLowRelevance(BannerType type);

struct BannerObservation {
  BannerType banner_type = BannerType::kNone;
  std::string banner_text;
};

// Phrase classification of extracted banner text.
BannerType ClassifyBanner(std::string_view banner_text);

struct SerpRecord {
  std::string query_text;
  std::string fetched_at;
  std::string wave_id;
  int step_index = 0;
  std::vector<SearchResult> results;
  BannerObservation banner;
  std::optional<std::int64_t> estimated_total_results;
  bool truncation_notice = false;

  // Non-ad result URLs in page order, duplicates removed.
  std::vector<std::string> RankedUrls() const;
  std::size_t organic_count() const;
};

// "About 4,600,000 results (0.42 seconds)" -> 4600000. Accepts comma, period,
// space, NBSP, thin-space and narrow-NBSP group separators.
std::optional<std::int64_t> ParseResultCount(std::string_view text);

// Parses a result page. Throws Error(kUnparseableHtml) with a diagnostic when
// none of the expected page landmarks are present. Query and crawl metadata
// are left empty for the caller to fill in.
SerpRecord ParseSerp(std::string_view html);

// ---------------------------------------------------------------------------
// Registrable domains.

class PublicSuffixList {
 public:
  // One rule per line in the publicsuffix.org format ("*." wildcards, "!"
  // exceptions, "//" comments).
  static PublicSuffixList Parse(std::string_view text);
  static PublicSuffixList LoadFile(const std::filesystem::path& path);
  static const PublicSuffixList& Default();

  // Host must be lower-case. Returns the host itself when it is an IP literal
  // or is itself a public suffix.
  std::string RegistrableDomain(std::string_view host) const;
  std::size_t size() const { return rules_.size(); }

 private:
  std::vector<std::string> rules_;  // sorted, with '!' / '*' markers kept
};

// Throws Error(kInvalidUrl) for non-absolute or hostless URLs. A leading
// "www." label is stripped before the lookup.
std::string ExtractDomain(std::string_view url,
                          const PublicSuffixList& psl = PublicSuffixList::Default());

}  // namespace voidscope
