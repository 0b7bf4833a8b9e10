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
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "voidscope/config.hpp"
#include "voidscope/dependency.hpp"
#include "voidscope/serp.hpp"
#include "voidscope/stability.hpp"
#include "voidscope/voids.hpp"

namespace testsupport {

std::filesystem::path SourceDir();
std::filesystem::path FixtureDir();
// Empty directory under the system temp dir, unique per process.
std::filesystem::path FreshDir(std::string_view name);

// The fixture pipeline config with its work directory moved to `work_dir`.
voidscope::PipelineConfig FixtureConfig(const std::filesystem::path& work_dir);
std::filesystem::path GoldenDir();
// Work-dir relative artifacts compared byte for byte against GoldenDir().
const std::vector<std::string>& GoldenArtifacts();
// Empty when every artifact matches; otherwise one line per difference.
std::string CompareWithGolden(const std::filesystem::path& work_dir);
void WriteGolden(const std::filesystem::path& work_dir);

// Distinct items drawn from "u0".."u{pool-1}", random length 0..max_len.
std::vector<std::string> RandomRankedList(std::mt19937_64& rng, int max_len, int pool);

// 2..max_steps SERPs over at most max_urls URLs, at least one of each
// banner state.
voidscope::BannerTimeline RandomTimeline(std::mt19937_64& rng, int max_steps, int max_urls);

// The planted URL appears exactly in the bannered SERPs. Background URLs
// are independent noise, redrawn when their presence pattern would copy the
// trigger's, so the planted URL is the only single-URL trigger.
voidscope::BannerTimeline PlantedTimeline(std::mt19937_64& rng, std::string* planted);

// Each step replaces every position of a 10-item list with a fresh URL with
// probability `rate`.
std::vector<voidscope::RboMatrix> ChurnCorpus(std::mt19937_64& rng, double rate, int queries,
                                              int steps);

struct SparseLogitData {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  double intercept = 0;
  std::vector<double> weights;  // weights[2] is the planted zero
};
SparseLogitData MakeSparseLogitData(std::uint64_t seed, int n);

struct BannerCase {
  std::string file;
  voidscope::BannerType expected;
};
// Reads fixtures/banners/expected.csv.
std::vector<BannerCase> LoadBannerCases();

// Labels for one wave with the given per-type banner counts; the rest of
// `total` get no banner.
std::vector<voidscope::VoidLabel> LabelsWithCounts(
    const std::string& wave, std::int64_t total,
    const std::map<voidscope::BannerType, std::int64_t>& counts);

// Reference banner-count table for three crawls: counts and the percentages as
// printed, with the printed number of decimals.
struct PrintedCell {
  std::int64_t count = 0;
  std::string percent;  // empty for "-"
};
struct PrintedRow {
  std::string label;
  std::vector<PrintedCell> cells;  // crawl-1, crawl-2, crawl-3
};
std::vector<PrintedRow> PrintedBannerTable();
inline constexpr std::int64_t kCrawlTotal = 1437898;

}  // namespace testsupport
