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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "voidscope/serp.hpp"

namespace voidscope {

struct QualityIndex {
  std::map<std::string, double> scores;
  std::set<std::string> excluded_platforms = {"youtube.com", "facebook.com",
                                              "google.com"};

  std::optional<double> Lookup(std::string_view domain) const;
  bool IsExcluded(std::string_view domain) const;
};

struct PartisanshipIndex {
  std::map<std::string, double> scores;

  std::optional<double> Lookup(std::string_view domain) const;
};

struct SeoRecord {
  double backlinks = 0;
  double traffic_estimate = 0;
  double referring_domains = 0;
  double referring_ips = 0;
  double edu_backlinks = 0;
  double gov_backlinks = 0;
};

struct SeoIndex {
  std::map<std::string, SeoRecord> rows;

  const SeoRecord* Lookup(std::string_view domain) const;
};

// Domain keys are lower-cased and "www."-stripped on load. Duplicate keys
// with equal values collapse; different values throw
// Error(kDuplicateConflict). Out-of-range values throw Error(kOutOfRange).
QualityIndex LoadQualityScores(std::string_view csv);
PartisanshipIndex LoadPartisanship(std::string_view csv);
// Columns: domain,backlinks,traffic_estimate,referring_domains,referring_ips,
// edu_backlinks,gov_backlinks
SeoIndex LoadSeo(std::string_view csv);
// One domain per line, '#' comments.
std::set<std::string> LoadNewsList(std::string_view text);

enum class QualityMean { kInstance, kUniqueDomain };

struct AggregateOptions {
  QualityMean quality_mean = QualityMean::kInstance;
  double unreliable_threshold = 0.5;
};

struct SerpAggregate {
  std::optional<double> avg_domain_quality;
  std::optional<double> rank_weighted_partisanship;
  int news_domain_count = 0;
  int unique_domain_count = 0;
  int unreliable_domain_count = 0;
  std::optional<double> avg_domain_traffic_log10;
  std::optional<double> estimated_total_results_log10;
  int result_count = 0;
};

// 1 / log2(position + 1), position counted over non-ad results.
double RankWeight(int position);

// Ads are ignored. Excluded platforms are skipped for the quality mean only.
SerpAggregate AggregateSerp(const SerpRecord& serp, const QualityIndex& quality,
                            const PartisanshipIndex& partisanship,
                            const SeoIndex& seo, const std::set<std::string>& news,
                            const AggregateOptions& options = {});

}  // namespace voidscope
