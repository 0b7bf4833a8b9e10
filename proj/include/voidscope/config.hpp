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
#include <vector>

#include "voidscope/crawl.hpp"
#include "voidscope/dependency.hpp"
#include "voidscope/ingest.hpp"
#include "voidscope/metrics.hpp"
#include "voidscope/regression.hpp"
#include "voidscope/voids.hpp"

namespace voidscope {

enum class LogitRows { kFirstStep, kAllSteps };
enum class ExplainBanner { kLowQuality, kAny };

struct PipelineConfig {
  std::filesystem::path work_dir = "voidscope-out";
  std::uint64_t seed = 7;

  // Inputs. Relative paths resolve against the config file's directory.
  std::filesystem::path directives;
  std::filesystem::path lexicons;
  std::filesystem::path engine_rules;  // optional; built-in table otherwise
  std::filesystem::path psl;           // optional; built-in subset otherwise
  std::filesystem::path quality;
  std::filesystem::path partisanship;
  std::filesystem::path seo;
  std::filesystem::path news;
  std::filesystem::path model_preds;  // optional confidence CSV
  std::filesystem::path replay_dir;   // recorded pages for fetcher = replay

  // Perturbation variants written next to the queries (none by default).
  PerturbationSpec perturb;

  // Crawl.
  std::string wave_id = "wave-1";
  Cadence cadence;
  int results_per_query = 10;
  int delay_ms = 1000;
  std::string location_label;
  Engine engine = Engine::kGoogle;
  std::string fetcher = "replay";  // replay | http
  std::string crawl_start = "2023-10-17T00:00:00Z";  // virtual clock origin for replay
  int max_attempts = 3;
  int backoff_ms = 2000;

  // Analysis.
  QualityMean quality_mean = QualityMean::kInstance;
  int window_max = 12;
  int rbo_depth = 0;
  std::vector<int> band_edges = {0, 1};  // lower bounds of banner-count bands
  int cutoff_min = 1;
  int cutoff_max = 50;
  int max_order = 2;
  PairMode pair_mode = PairMode::kJoint;
  ExplainBanner explain_banner = ExplainBanner::kLowQuality;
  std::vector<LogitTarget> logit_targets = {LogitTarget::kLowQuality, LogitTarget::kLowRelevance};
  double alpha = 0.1;
  bool standardize = false;
  LogitRows logit_rows = LogitRows::kFirstStep;
  double quality_threshold = 0.5;
  Comparator comparator = Comparator::kLessOrEqual;
  double model_threshold = 0.9;
  std::optional<ExtrapolationInputs> extrapolation;
};

// key = value lines, '#' comments. Unknown keys and bad values throw
// Error(kConfig).
PipelineConfig ParseConfig(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig LoadConfig(const std::filesystem::path& path);

// Checks value ranges and that every configured input path exists. Throws
// Error(kConfig) listing all problems at once.
void ValidateConfig(const PipelineConfig& config);

// Canonical key=value text of the analysis settings. Paths are left out so
// the hash does not depend on where the inputs live; their contents are
// hashed separately.
std::string CanonicalAnalysisSettings(const PipelineConfig& config);
std::string ConfigHash(const PipelineConfig& config);

// "0,1,5" -> labels "0", "1-4", "5+".
std::string BandLabel(const std::vector<int>& edges, int count);

}  // namespace voidscope
