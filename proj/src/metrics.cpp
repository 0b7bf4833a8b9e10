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

#include "voidscope/metrics.hpp"

#include <cmath>
#include <vector>

#include "voidscope/error.hpp"
#include "voidscope/text.hpp"

namespace voidscope {

namespace {

std::string NormalizeDomain(std::string_view raw) {
  std::string d = text::ToLowerAscii(text::TrimAscii(raw));
  while (!d.empty() && d.back() == '.') d.pop_back();
  if (d.starts_with("www.")) d.erase(0, 4);
  return d;
}

double ParseNumber(std::string_view field, std::string_view what, std::size_t row) {
  const std::string s(text::TrimAscii(field));
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kParse, std::string(what) + " row " + std::to_string(row) +
                                       ": not a number: '" + s + "'");
  }
  return v;
}

// Rows after a header whose first column is "domain".
std::vector<std::vector<std::string>> DataRows(std::string_view csv,
                                               const std::vector<std::string>& header,
                                               std::string_view what) {
  auto rows = text::ParseCsv(csv);
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, std::string(what) + " table is empty");
  std::vector<std::string> got;
  for (const auto& h : rows[0]) got.push_back(text::ToLowerAscii(text::TrimAscii(h)));
  if (got != header) {
    std::string expected;
    for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
    throw Error(ErrorCode::kParse, std::string(what) + " header must be " + expected);
  }
  rows.erase(rows.begin());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != header.size()) {
      throw Error(ErrorCode::kParse, std::string(what) + " row " + std::to_string(i + 2) +
                                         ": expected " + std::to_string(header.size()) +
                                         " columns");
    }
  }
  return rows;
}

template <typename Map, typename Value>
void InsertChecked(Map& map, const std::string& key, const Value& value, std::string_view what,
                   std::size_t row) {
  auto [it, inserted] = map.emplace(key, value);
  if (!inserted && !(it->second == value)) {
    throw Error(ErrorCode::kDuplicateConflict, std::string(what) + " row " +
                                                   std::to_string(row) +
                                                   ": conflicting duplicate for " + key);
  }
}

std::map<std::string, double> LoadScores(std::string_view csv, std::string_view what,
                                         double lo, double hi) {
  std::map<std::string, double> scores;
  const auto rows = DataRows(csv, {"domain", "score"}, what);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t row = i + 2;
    const std::string domain = NormalizeDomain(rows[i][0]);
    if (domain.empty()) {
      throw Error(ErrorCode::kParse, std::string(what) + " row " + std::to_string(row) +
                                         ": empty domain");
    }
    const double score = ParseNumber(rows[i][1], what, row);
    if (score < lo || score > hi) {
      throw Error(ErrorCode::kOutOfRange, std::string(what) + " row " + std::to_string(row) +
                                              ": score " + std::string(text::TrimAscii(rows[i][1])) +
                                              " outside range");
    }
    InsertChecked(scores, domain, score, what, row);
  }
  return scores;
}

template <typename Map>
auto LookupIn(const Map& map, std::string_view domain) -> decltype(&map.begin()->second) {
  auto it = map.find(NormalizeDomain(domain));
  return it == map.end() ? nullptr : &it->second;
}

bool operator==(const SeoRecord& a, const SeoRecord& b) {
  return a.backlinks == b.backlinks && a.traffic_estimate == b.traffic_estimate &&
         a.referring_domains == b.referring_domains && a.referring_ips == b.referring_ips &&
         a.edu_backlinks == b.edu_backlinks && a.gov_backlinks == b.gov_backlinks;
}

}  // namespace

std::optional<double> QualityIndex::Lookup(std::string_view domain) const {
  const double* v = LookupIn(scores, domain);
  return v ? std::optional<double>(*v) : std::nullopt;
}

bool QualityIndex::IsExcluded(std::string_view domain) const {
  return excluded_platforms.contains(NormalizeDomain(domain));
}

std::optional<double> PartisanshipIndex::Lookup(std::string_view domain) const {
  const double* v = LookupIn(scores, domain);
  return v ? std::optional<double>(*v) : std::nullopt;
}

const SeoRecord* SeoIndex::Lookup(std::string_view domain) const {
  return LookupIn(rows, domain);
}

QualityIndex LoadQualityScores(std::string_view csv) {
  QualityIndex index;
  index.scores = LoadScores(csv, "quality", 0.0, 1.0);
  return index;
}

PartisanshipIndex LoadPartisanship(std::string_view csv) {
  PartisanshipIndex index;
  index.scores = LoadScores(csv, "partisanship", -1.0, 1.0);
  return index;
}

SeoIndex LoadSeo(std::string_view csv) {
  SeoIndex index;
  const auto rows = DataRows(csv,
                             {"domain", "backlinks", "traffic_estimate", "referring_domains",
                              "referring_ips", "edu_backlinks", "gov_backlinks"},
                             "seo");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t row = i + 2;
    double v[6];
    for (int k = 0; k < 6; ++k) {
      v[k] = ParseNumber(rows[i][k + 1], "seo", row);
      if (v[k] < 0) {
        throw Error(ErrorCode::kOutOfRange, "seo row " + std::to_string(row) +
                                                ": negative value");
      }
    }
    InsertChecked(index.rows, NormalizeDomain(rows[i][0]),
                  SeoRecord{v[0], v[1], v[2], v[3], v[4], v[5]}, "seo", row);
  }
  return index;
}

std::set<std::string> LoadNewsList(std::string_view list) {
  std::set<std::string> out;
  for (std::string_view line : text::Split(list, '\n')) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string d = NormalizeDomain(line);
    if (!d.empty()) out.insert(d);
  }
  return out;
}

double RankWeight(int position) { return 1.0 / std::log2(position + 1.0); }

SerpAggregate AggregateSerp(const SerpRecord& serp, const QualityIndex& quality,
                            const PartisanshipIndex& partisanship, const SeoIndex& seo,
                            const std::set<std::string>& news,
                            const AggregateOptions& options) {
  SerpAggregate agg;
  double quality_sum = 0;
  int quality_n = 0;
  double weight_sum = 0;
  double partisan_sum = 0;
  std::set<std::string> domains;
  std::set<std::string> quality_domains;
  int position = 0;

  for (const SearchResult& r : serp.results) {
    if (r.result_type == ResultType::kAd) continue;
    ++position;
    const std::string domain = NormalizeDomain(r.domain);
    domains.insert(domain);
    if (news.contains(domain)) ++agg.news_domain_count;

    if (auto q = quality.Lookup(domain)) {
      if (*q < options.unreliable_threshold) ++agg.unreliable_domain_count;
      if (!quality.IsExcluded(domain)) {
        const bool count = options.quality_mean == QualityMean::kInstance ||
                           quality_domains.insert(domain).second;
        if (count) {
          quality_sum += *q;
          ++quality_n;
        }
      }
    }
    if (auto p = partisanship.Lookup(domain)) {
      const double w = RankWeight(position);
      weight_sum += w;
      partisan_sum += w * *p;
    }
  }
  agg.result_count = position;
  agg.unique_domain_count = static_cast<int>(domains.size());
  if (quality_n > 0) agg.avg_domain_quality = quality_sum / quality_n;
  if (weight_sum > 0) agg.rank_weighted_partisanship = partisan_sum / weight_sum;

  double traffic_sum = 0;
  int traffic_n = 0;
  for (const std::string& d : domains) {
    if (const SeoRecord* s = seo.Lookup(d)) {
      traffic_sum += std::log10(1.0 + s->traffic_estimate);
      ++traffic_n;
    }
  }
  if (traffic_n > 0) agg.avg_domain_traffic_log10 = traffic_sum / traffic_n;
  if (serp.estimated_total_results) {
    agg.estimated_total_results_log10 =
        std::log10(1.0 + static_cast<double>(*serp.estimated_total_results));
  }
  return agg;
}

}  // namespace voidscope
