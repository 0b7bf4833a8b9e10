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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "voidscope/config.hpp"
#include "voidscope/error.hpp"
#include "voidscope/fetchers.hpp"
#include "voidscope/hash.hpp"
#include "voidscope/io.hpp"
#include "voidscope/pipeline.hpp"
#include "voidscope/text.hpp"

namespace fs = std::filesystem;
using namespace voidscope;

namespace {

void WriteOut(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  WriteFileAtomic(path, content);
}

template <typename T, typename F>
std::string Lines(const std::vector<T>& values, F to_json) {
  std::string out;
  for (const T& v : values) out += DumpLine(to_json(v)) + "\n";
  return out;
}

Json Identity(const Json& j) { return j; }

std::vector<int> ParseBands(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : text::Split(s, ',')) out.push_back(std::stoi(std::string(text::TrimAscii(part))));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collect search result pages and measure data voids."};
  app.set_version_flag("--version", std::string(VOIDSCOPE_VERSION));
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run pipeline stages from a config file");
  fs::path config_path;
  std::vector<std::string> stages;
  fs::path work_dir_override;
  run->add_option("--config", config_path, "Pipeline config (key = value)")->required();
  run->add_option("--stages", stages, "Stages to run, in order (default: all)")->delimiter(',');
  run->add_option("--work-dir", work_dir_override, "Override work_dir");

  auto* check = app.add_subcommand("validate-config", "Validate a config and print its hash");
  check->add_option("--config", config_path)->required();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Extract search directives from post URLs");
  fs::path in_posts, in_lexicons, in_rules, out_queries, out_directives, out_perturb;
  PerturbationSpec perturb;
  double typo = -1;
  std::uint64_t seed = 7;
  ingest->add_option("--input", in_posts, "One post URL per line")->required();
  ingest->add_option("--lexicons", in_lexicons, "Lexicon CSV")->required();
  ingest->add_option("--engine-rules", in_rules, "Engine rules file");
  ingest->add_option("--out", out_queries, "Queries NDJSON")->required();
  ingest->add_option("--directives-out", out_directives, "Directives NDJSON");
  ingest->add_option("--perturbations-out", out_perturb, "Perturbed variants NDJSON");
  ingest->add_flag("--pluralize", perturb.pluralize);
  ingest->add_option("--typo-probability", typo);
  ingest->add_flag("--quote-toggle", perturb.quote_toggle);
  ingest->add_option("--seed", seed);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Schedule a crawl wave");
  fs::path in_queries, out_plan;
  CrawlConfig crawl_config;
  std::string cadence = "single_pass", engine = "google";
  std::int64_t interval = 0;
  int steps = 1;
  plan_cmd->add_option("--queries", in_queries)->required();
  plan_cmd->add_option("--wave-id", crawl_config.wave_id)->required();
  plan_cmd->add_option("--cadence", cadence)->check(CLI::IsMember({"single_pass", "repeated"}));
  plan_cmd->add_option("--interval-seconds", interval);
  plan_cmd->add_option("--steps", steps);
  plan_cmd->add_option("--results", crawl_config.results_per_query);
  plan_cmd->add_option("--delay-ms", crawl_config.politeness_delay_ms);
  plan_cmd->add_option("--location", crawl_config.location_label);
  plan_cmd->add_option("--engine", engine);
  plan_cmd->add_option("--out", out_plan)->required();

  // crawl
  auto* crawl = app.add_subcommand("crawl", "Execute a crawl plan into a store");
  fs::path in_plan, store_dir, replay_dir;
  std::optional<int> delay_override;
  std::string start = "2023-10-17T00:00:00Z";
  RetryPolicy retry;
  int backoff_ms = 2000;
  crawl->add_option("--plan", in_plan)->required();
  crawl->add_option("--store,--out", store_dir)->required();
  crawl->add_option("--replay", replay_dir, "Serve recorded pages instead of fetching");
  crawl->add_option("--start", start, "Virtual clock origin for --replay");
  crawl->add_option("--delay-ms", delay_override, "Override the plan's politeness delay");
  crawl->add_option("--max-attempts", retry.max_attempts);
  crawl->add_option("--backoff-ms", backoff_ms);

  // parse
  auto* parse = app.add_subcommand("parse", "Parse stored pages into SERP records");
  fs::path out_serps, out_quarantine, in_psl;
  parse->add_option("--store", store_dir)->required();
  parse->add_option("--out", out_serps)->required();
  parse->add_option("--quarantine", out_quarantine);
  parse->add_option("--psl", in_psl, "Public suffix list");

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "Per-SERP domain metrics");
  fs::path in_serps, in_quality, in_partisan, in_seo, in_news, out_path;
  std::string quality_mean = "instance";
  aggregate->add_option("--serps", in_serps)->required();
  aggregate->add_option("--quality", in_quality)->required();
  aggregate->add_option("--partisanship", in_partisan)->required();
  aggregate->add_option("--seo", in_seo)->required();
  aggregate->add_option("--news", in_news)->required();
  aggregate->add_option("--quality-mean", quality_mean)
      ->check(CLI::IsMember({"instance", "unique_domain"}));
  aggregate->add_option("--out", out_path)->required();

  // stability
  auto* stability = app.add_subcommand("stability", "Rank-biased overlap over time");
  StabilityParams sp;
  std::string bands = "0,1";
  fs::path matrices_dir;
  stability->add_option("--serps", in_serps)->required();
  stability->add_option("--window-max", sp.window_max);
  stability->add_option("--depth", sp.depth);
  stability->add_option("--bands", bands, "Lower bounds of banner-count bands");
  stability->add_option("--matrices-dir", matrices_dir);
  stability->add_option("--out", out_path)->required();

  // explain
  auto* explain = app.add_subcommand("explain", "URL explanations of banner variance");
  ExplainParams ep;
  std::string pair_mode = "joint", banner = "low_quality";
  explain->add_option("--serps", in_serps)->required();
  explain->add_option("--cutoff-min", ep.cutoff_min);
  explain->add_option("--cutoff-max", ep.cutoff_max);
  std::string cutoffs;
  explain->add_option("--cutoffs", cutoffs, "Cutoff range as MIN..MAX")
      ->excludes("--cutoff-min")
      ->excludes("--cutoff-max");
  explain->add_option("--max-order", ep.max_order)->check(CLI::Range(1, 3));
  explain->add_option("--pair-mode", pair_mode)->check(CLI::IsMember({"joint", "independent"}));
  explain->add_option("--banner", banner)->check(CLI::IsMember({"low_quality", "any"}));
  explain->add_option("--out", out_path)->required();

  // logit
  auto* logit = app.add_subcommand("logit", "L1-regularized logistic regression");
  fs::path in_aggregates;
  std::string target = "low_quality", rows = "first_step";
  LogitOptions lo;
  logit->add_option("--aggregates", in_aggregates)->required();
  logit->add_option("--queries", in_queries)->required();
  logit->add_option("--target", target)->check(CLI::IsMember({"low_quality", "low_relevance"}));
  logit->add_option("--alpha", lo.alpha);
  logit->add_flag("--standardize", lo.standardize);
  logit->add_option("--rows", rows)->check(CLI::IsMember({"first_step", "all_steps"}));
  logit->add_option("--out", out_path)->required();

  // report
  auto* report = app.add_subcommand("report", "Void labels and prevalence");
  ReportParams rp;
  fs::path in_preds, out_text, out_labels;
  std::string comparator = "le";
  std::optional<double> daily, void_rate, banner_rate;
  report->add_option("--aggregates", in_aggregates)->required();
  report->add_option("--preds", in_preds, "query_id,confidence CSV");
  report->add_option("--quality-threshold,--threshold", rp.quality_threshold);
  report->add_option("--comparator", comparator)->check(CLI::IsMember({"le", "lt"}));
  report->add_option("--model-threshold", rp.model_threshold);
  report->add_option("--daily-searches", daily);
  report->add_option("--void-rate", void_rate);
  report->add_option("--banner-rate", banner_rate);
  report->add_option("--out", out_path)->required();
  report->add_option("--text-out", out_text);
  report->add_option("--labels-out", out_labels);

  auto* export_cmd = app.add_subcommand("export-model-data", "Write model training NDJSON");
  export_cmd->add_option("--serps", in_serps)->required();
  export_cmd->add_option("--queries", in_queries)->required();
  export_cmd->add_option("--out", out_path)->required();

  auto* import_cmd = app.add_subcommand("import-model-preds", "Validate model confidences");
  import_cmd->add_option("--in", in_preds)->required();
  import_cmd->add_option("--queries", in_queries, "Reject ids not in this queries file");
  import_cmd->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *check) {
      PipelineConfig config = LoadConfig(config_path);
      if (!work_dir_override.empty()) config.work_dir = work_dir_override;
      ValidateConfig(config);
      if (*check) {
        std::cout << CanonicalAnalysisSettings(config) << "config_hash=" << ConfigHash(config)
                  << "\n";
        return 0;
      }
      Pipeline pipeline(config, &std::cerr);
      if (stages.empty()) {
        pipeline.RunAll();
      } else {
        pipeline.Run(stages);
      }
    } else if (*ingest) {
      if (typo >= 0) perturb.typo_probability = typo;
      const EngineRules rules =
          in_rules.empty() ? EngineRules::Default() : EngineRules::LoadFile(in_rules);
      const auto lexicons = LoadLexiconCsv(in_lexicons);
      const IngestOutput out = IngestPosts(ReadTextFile(in_posts), rules, lexicons, perturb, seed);
      WriteOut(out_queries, Lines(out.queries, QueryEntryToJson));
      if (!out_directives.empty()) {
        WriteOut(out_directives, Lines(out.directives, [](const SearchDirective& d) {
                   return Json(d);
                 }));
      }
      if (!out_perturb.empty()) WriteOut(out_perturb, Lines(out.perturbations, Identity));
      std::cerr << out.summary.unique_queries << " queries, " << out.summary.directives
                << " directives, " << out.summary.malformed << " malformed, "
                << out.summary.not_search << " not searches\n";
    } else if (*plan_cmd) {
      crawl_config.cadence = cadence == "repeated" ? Cadence::Repeated(interval, steps)
                                                   : Cadence::SinglePass();
      auto e = EngineFromName(engine);
      if (!e) throw Error(ErrorCode::kInvalidArgument, "unknown engine '" + engine + "'");
      crawl_config.engine = *e;
      std::vector<Query> queries;
      for (const QueryEntry& q : ReadQueries(in_queries)) queries.push_back(q.query);
      const CrawlPlan plan = ScheduleWave(queries, crawl_config);
      WriteOut(out_plan, DumpPretty(Json(plan)));
      std::cerr << plan.task_count() << " tasks\n";
    } else if (*crawl) {
      CrawlPlan plan = Json::parse(ReadTextFile(in_plan)).get<CrawlPlan>();
      if (delay_override) plan.politeness_delay_ms = *delay_override;
      retry.initial_backoff = std::chrono::milliseconds(backoff_ms);
      CrawlStore store(store_dir);
      store.manifest.RepairTail();
      std::unique_ptr<Fetcher> fetcher;
      std::unique_ptr<CrawlClock> clock;
      if (!replay_dir.empty()) {
        fetcher = std::make_unique<ReplayFetcher>(replay_dir);
        clock = std::make_unique<VirtualClock>(ParseUtc(start));
      } else {
        fetcher = std::make_unique<HttpFetcher>(HttpFetcherOptions::FromEnvironment());
        clock = std::make_unique<SystemClock>();
      }
      const CrawlSummary s = RunCrawl(plan, *fetcher, store, *clock, retry);
      std::cerr << s.fetched << " fetched, " << s.skipped << " already stored, " << s.gaps
                << " gaps\n";
    } else if (*parse) {
      const CrawlStore store(store_dir);
      const auto records = store.manifest.Load();
      const PublicSuffixList psl =
          in_psl.empty() ? PublicSuffixList::Default() : PublicSuffixList::LoadFile(in_psl);
      const ParseOutput out = ParseCrawl(records, store.blobs, psl);
      WriteOut(out_serps, Lines(out.serps, [](const SerpRecord& s) { return Json(s); }));
      if (!out_quarantine.empty()) WriteOut(out_quarantine, Lines(out.quarantine, Identity));
      std::cerr << out.serps.size() << " SERPs, " << out.gaps << " gaps, "
                << out.quarantine.size() << " quarantined\n";
    } else if (*aggregate) {
      MetricTables tables;
      tables.quality = LoadQualityScores(ReadTextFile(in_quality));
      tables.partisanship = LoadPartisanship(ReadTextFile(in_partisan));
      tables.seo = LoadSeo(ReadTextFile(in_seo));
      tables.news = LoadNewsList(ReadTextFile(in_news));
      AggregateOptions options;
      options.quality_mean =
          quality_mean == "instance" ? QualityMean::kInstance : QualityMean::kUniqueDomain;
      const auto serps = ReadSerps(in_serps);
      WriteOut(out_path, Lines(AggregateSerps(serps, tables, options), AggregateRowToJson));
    } else if (*stability) {
      sp.band_edges = ParseBands(bands);
      const auto serps = ReadSerps(in_serps);
      const StabilityOutput out = AnalyzeStability(serps, sp);
      WriteOut(out_path, DumpPretty(out.report));
      if (!matrices_dir.empty()) {
        for (const auto& [name, csv] : out.matrices) WriteOut(matrices_dir / name, csv);
      }
    } else if (*explain) {
      if (!cutoffs.empty()) {
        const auto dots = cutoffs.find("..");
        try {
          if (dots == std::string::npos) throw std::invalid_argument(cutoffs);
          ep.cutoff_min = std::stoi(cutoffs.substr(0, dots));
          ep.cutoff_max = std::stoi(cutoffs.substr(dots + 2));
        } catch (const std::exception&) {
          throw Error(ErrorCode::kInvalidArgument, "--cutoffs expects MIN..MAX, got " + cutoffs);
        }
      }
      ep.pair_mode = pair_mode == "joint" ? PairMode::kJoint : PairMode::kIndependent;
      ep.banner = banner == "any" ? ExplainBanner::kAny : ExplainBanner::kLowQuality;
      const auto serps = ReadSerps(in_serps);
      WriteOut(out_path, DumpPretty(ExplainBanners(serps, ep)));
    } else if (*logit) {
      LogitStageParams params;
      params.target = *LogitTargetFromName(target);
      params.rows = rows == "all_steps" ? LogitRows::kAllSteps : LogitRows::kFirstStep;
      params.options = lo;
      const auto aggregates = ReadAggregates(in_aggregates);
      const auto queries = ReadQueries(in_queries);
      const Json card = FitLogitStage(aggregates, queries, params);
      WriteOut(out_path, DumpPretty(card));
      if (card.contains("error")) std::cerr << "warning: " << card["error"].get<std::string>() << "\n";
    } else if (*report) {
      rp.comparator = comparator == "lt" ? Comparator::kLess : Comparator::kLessOrEqual;
      if (daily || void_rate || banner_rate) {
        if (!(daily && void_rate && banner_rate)) {
          throw Error(ErrorCode::kInvalidArgument,
                      "--daily-searches, --void-rate and --banner-rate go together");
        }
        rp.extrapolation = ExtrapolationInputs{*daily, *void_rate, *banner_rate};
      }
      std::map<std::string, double> confidences;
      if (!in_preds.empty()) {
        for (const auto& [qid, c] : ImportModelPreds(ReadTextFile(in_preds), {})) confidences[qid] = c;
      }
      const auto aggregates = ReadAggregates(in_aggregates);
      const ReportOutput out = BuildReport(aggregates, confidences, rp);
      WriteOut(out_path, DumpPretty(out.report));
      if (!out_text.empty()) WriteOut(out_text, out.text);
      if (!out_labels.empty()) {
        WriteOut(out_labels, Lines(out.labels, [](const VoidLabel& l) { return Json(l); }));
      }
      std::cout << out.text;
    } else if (*export_cmd) {
      WriteOut(out_path, Lines(ExportModelData(ReadSerps(in_serps), ReadQueries(in_queries)),
                               Identity));
    } else if (*import_cmd) {
      std::set<std::string> known;
      if (!in_queries.empty()) {
        for (const QueryEntry& e : ReadQueries(in_queries)) known.insert(e.query_id);
      }
      std::vector<Json> lines;
      for (const auto& [qid, c] : ImportModelPreds(ReadTextFile(in_preds), known)) {
        lines.push_back({{"query_id", qid}, {"confidence", c}});
      }
      WriteOut(out_path, Lines(lines, Identity));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kMissingDependency || e.code() == ErrorCode::kConfig ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
