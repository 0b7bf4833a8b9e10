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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "voidscope/crawl.hpp"
#include "voidscope/dependency.hpp"
#include "voidscope/ingest.hpp"
#include "voidscope/metrics.hpp"
#include "voidscope/regression.hpp"
#include "voidscope/serp.hpp"
#include "voidscope/stability.hpp"
#include "voidscope/voids.hpp"

namespace voidscope {

// Keys are sorted, so dumps are deterministic.
using Json = nlohmann::json;

void to_json(Json& j, const OperatorSet& v);
void from_json(const Json& j, OperatorSet& v);
void to_json(Json& j, const TopicTags& v);
void from_json(const Json& j, TopicTags& v);
void to_json(Json& j, const Query& v);
void from_json(const Json& j, Query& v);
void to_json(Json& j, const SearchDirective& v);

void to_json(Json& j, const Cadence& v);
void from_json(const Json& j, Cadence& v);
void to_json(Json& j, const CrawlPlan& v);
void from_json(const Json& j, CrawlPlan& v);
void to_json(Json& j, const CrawlRecord& v);
void from_json(const Json& j, CrawlRecord& v);

void to_json(Json& j, const SearchResult& v);
void from_json(const Json& j, SearchResult& v);
void to_json(Json& j, const SerpRecord& v);
void from_json(const Json& j, SerpRecord& v);

void to_json(Json& j, const SerpAggregate& v);
void from_json(const Json& j, SerpAggregate& v);

void to_json(Json& j, const StabilityReport& v);
void to_json(Json& j, const ChurnReport& v);
void to_json(Json& j, const RankCutoffCondition& v);
void to_json(Json& j, const Tally& v);

void to_json(Json& j, const LogitModel& v);
void from_json(const Json& j, LogitModel& v);

void to_json(Json& j, const VoidLabel& v);
void to_json(Json& j, const DefinitionStats& v);
void to_json(Json& j, const WaveStats& v);
void to_json(Json& j, const PrevalenceReport& v);

// Doubles are written with enough digits to round-trip.
std::string DumpLine(const Json& j);
std::string DumpPretty(const Json& j);

// Reads NDJSON; blank lines are skipped. Throws Error(kParse) with the line
// number on malformed input.
std::vector<Json> ReadNdjson(const std::filesystem::path& path);
std::vector<Json> ParseNdjson(std::string_view text);

}  // namespace voidscope
