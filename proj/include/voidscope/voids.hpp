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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voidscope/metrics.hpp"
#include "voidscope/serp.hpp"

namespace voidscope {

enum class Comparator { kLessOrEqual, kLess };

std::optional<bool> ClassifyVoidByQuality(std::optional<double> avg_domain_quality,
                                          double threshold = 0.5,
                                          Comparator comparator = Comparator::kLessOrEqual);
std::optional<bool> ClassifyVoidByQuality(const SerpAggregate& agg, double threshold = 0.5,
                                          Comparator comparator = Comparator::kLessOrEqual);

// Throws Error(kOutOfRange) when confidence is outside [0, 1].
bool ClassifyVoidByModel(double confidence, double threshold = 0.9);

struct VoidLabel {
  std::string query_id;
  std::string wave_id;
  int step_index = 0;
  BannerType banner_type = BannerType::kNone;
  bool by_banner = false;  // low-quality banner observed
  std::optional<bool> by_quality;
  std::optional<bool> by_model;
  std::optional<double> model_confidence;
};

struct ExtrapolationInputs {
  double daily_searches = 0;
  double void_rate = 0;
  double banner_rate = 0;
};

struct Extrapolation {
  ExtrapolationInputs inputs;
  double daily_voids = 0;
  double bannered_daily_voids = 0;
};

Extrapolation Extrapolate(const ExtrapolationInputs& inputs);

struct DefinitionStats {
  std::int64_t labeled = 0;  // SERPs where the definition is defined
  std::int64_t voids = 0;
  std::int64_t bannered_voids = 0;  // voids that also carry a low-quality banner
  std::int64_t bannered = 0;        // labeled SERPs with a low-quality banner
  double void_rate = 0;
  std::optional<double> voids_bannered;    // bannered_voids / voids
  std::optional<double> bannered_are_voids;  // bannered_voids / bannered
};

struct WaveStats {
  std::string wave_id;
  std::int64_t total = 0;
  std::map<BannerType, std::int64_t> banner_counts;  // every type, zeros kept
  std::int64_t any_banner = 0;
  std::int64_t low_relevance_all = 0;
  std::map<std::string, DefinitionStats> definitions;  // banner, quality, model

  double Rate(std::int64_t count) const;
};

struct PrevalenceReport {
  std::vector<WaveStats> waves;  // ordered by wave id
  std::optional<Extrapolation> extrapolation;
};

// Throws Error(kEmptyInput) for an empty dataset.
PrevalenceReport BuildPrevalenceReport(std::span<const VoidLabel> labels,
                                       std::optional<ExtrapolationInputs> extrapolation = {});

// Banner-type rows by wave: "count (pct%)" with four decimals, "-" for zero.
std::string FormatBannerTable(const PrevalenceReport& report);

// query_id,confidence CSV. Rows keep file order. Throws Error(kParse) on bad
// rows and Error(kOutOfRange) for confidences outside [0, 1].
std::vector<std::pair<std::string, double>> ParseConfidenceCsv(std::string_view csv);

}  // namespace voidscope
