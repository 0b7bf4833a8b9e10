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
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voidscope/config.hpp"
#include "voidscope/json_io.hpp"
#include "voidscope/serp.hpp"

namespace voidscope {

// "q" followed by the first 12 hex digits of SHA-256 over the normalized
// query text.
std::string QueryId(std::string_view text);

struct QueryEntry {
  std::string query_id;
  Query query;
  std::vector<std::string> sources;  // post URLs the query was shared in
};

// ---------------------------------------------------------------------------
// Stage building blocks. Each works on in-memory values so the CLI
// subcommands and the pipeline runner share them.

struct IngestSummary {
  std::size_t lines = 0;
  std::size_t directives = 0;
  std::size_t not_search = 0;  // parsable URLs that are not engine searches
  std::size_t malformed = 0;
  std::size_t empty_queries = 0;
  std::size_t unique_queries = 0;
};

struct IngestOutput {
  std::vector<SearchDirective> directives;
  std::vector<QueryEntry> queries;  // first-seen order
  std::vector<Json> perturbations;
  IngestSummary summary;
};

// One post URL per line, optionally followed by a tab and a posting time.
// Blank lines and '#' comments are skipped.
IngestOutput IngestPosts(std::string_view input, const EngineRules& rules,
                         std::span<const Lexicon> lexicons, const PerturbationSpec& perturb,
                         std::uint64_t seed);

Json QueryEntryToJson(const QueryEntry& entry);
QueryEntry QueryEntryFromJson(const Json& j);
std::vector<QueryEntry> ReadQueries(const std::filesystem::path& path);

struct ParseOutput {
  std::vector<SerpRecord> serps;  // ordered by wave, step, query text
  std::vector<Json> quarantine;   // records whose page could not be parsed
  std::size_t gaps = 0;
};

// Domains are recomputed with `psl`.
ParseOutput ParseCrawl(std::span<const CrawlRecord> records, const BlobStore& blobs,
                       const PublicSuffixList& psl);
std::vector<SerpRecord> ReadSerps(const std::filesystem::path& path);

struct AggregateRow {
  std::string query_id;
  std::string query_text;
  std::string wave_id;
  int step_index = 0;
  BannerType banner_type = BannerType::kNone;
  SerpAggregate aggregate;
};

struct MetricTables {
  QualityIndex quality;
  PartisanshipIndex partisanship;
  SeoIndex seo;
  std::set<std::string> news;
};

std::vector<AggregateRow> AggregateSerps(std::span<const SerpRecord> serps,
                                         const MetricTables& tables,
                                         const AggregateOptions& options);
Json AggregateRowToJson(const AggregateRow& row);
AggregateRow AggregateRowFromJson(const Json& j);
std::vector<AggregateRow> ReadAggregates(const std::filesystem::path& path);

struct StabilityParams {
  int window_max = 12;
  int depth = 0;
  std::vector<int> band_edges = {0, 1};
};

struct StabilityOutput {
  Json report;
  // Relative file name -> CSV text.
  std::map<std::string, std::string> matrices;
};

StabilityOutput AnalyzeStability(std::span<const SerpRecord> serps, const StabilityParams& params);

struct ExplainParams {
  int cutoff_min = 1;
  int cutoff_max = 50;
  int max_order = 2;
  PairMode pair_mode = PairMode::kJoint;
  ExplainBanner banner = ExplainBanner::kLowQuality;
};

Json ExplainBanners(std::span<const SerpRecord> serps, const ExplainParams& params);

struct LogitStageParams {
  LogitTarget target = LogitTarget::kLowQuality;
  LogitRows rows = LogitRows::kFirstStep;
  LogitOptions options;
};

// Model card: row accounting, the fitted model or the fit error.
Json FitLogitStage(std::span<const AggregateRow> rows, std::span<const QueryEntry> queries,
                   const LogitStageParams& params);

struct ReportParams {
  double quality_threshold = 0.5;
  Comparator comparator = Comparator::kLessOrEqual;
  double model_threshold = 0.9;
  std::optional<ExtrapolationInputs> extrapolation;
};

struct ReportOutput {
  std::vector<VoidLabel> labels;
  PrevalenceReport prevalence;
  Json report;
  std::string text;
};

// `confidences` maps query id to model confidence; queries without one get
// no model label.
ReportOutput BuildReport(std::span<const AggregateRow> rows,
                         const std::map<std::string, double>& confidences,
                         const ReportParams& params);

// One object per query: id, text, low-quality label and per-SERP result
// domains and titles.
std::vector<Json> ExportModelData(std::span<const SerpRecord> serps,
                                  std::span<const QueryEntry> queries);

// Validates a query_id,confidence CSV. With `known` non-empty, ids must be
// among them. Repeated ids throw Error(kDuplicateConflict).
std::vector<std::pair<std::string, double>> ImportModelPreds(std::string_view csv,
                                                             const std::set<std::string>& known);
std::map<std::string, double> ReadModelPreds(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Stateful runner over a work directory.

struct StageOutcome {
  std::string stage;
  bool skipped = false;  // inputs and outputs unchanged since the last run
  std::string message;
};

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, std::ostream* log = nullptr);

  // Execution order of `run`.
  static const std::vector<std::string>& StageNames();

  // Throws Error(kMissingDependency) when an upstream artifact is absent and
  // Error(kConfig) for unknown stage names or missing inputs.
  StageOutcome RunStage(std::string_view stage);
  std::vector<StageOutcome> Run(std::span<const std::string> stages);
  std::vector<StageOutcome> RunAll();

  // Artifact locations relative to the work directory.
  static std::string ArtifactName(std::string_view artifact);
  std::filesystem::path ArtifactPath(std::string_view artifact) const;

  const PipelineConfig& config() const { return config_; }

 private:
  Json Provenance(const std::map<std::string, std::string>& inputs) const;
  std::filesystem::path Require(std::string_view artifact, std::string_view producer) const;
  std::filesystem::path RequireInput(const std::filesystem::path& path, std::string_view key) const;
  bool UpToDate(std::string_view stage, const std::string& fingerprint) const;
  void SaveState(std::string_view stage, const std::string& fingerprint,
                 const std::vector<std::string>& outputs) const;
  std::string Fingerprint(const std::map<std::string, std::string>& inputs) const;
  void WriteArtifact(const std::string& relative, std::string_view content) const;
  PublicSuffixList LoadPsl() const;

  StageOutcome Ingest();
  StageOutcome Crawl();
  StageOutcome Parse();
  StageOutcome Aggregate();
  StageOutcome Stability();
  StageOutcome Explain();
  StageOutcome Logit();
  StageOutcome ImportPreds();
  StageOutcome Report();
  StageOutcome Export();

  PipelineConfig config_;
  std::string config_hash_;
  std::ostream* log_;
};

}  // namespace voidscope
