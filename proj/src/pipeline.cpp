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

#include "voidscope/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <tuple>

#include "voidscope/error.hpp"
#include "voidscope/fetchers.hpp"
#include "voidscope/hash.hpp"
#include "voidscope/io.hpp"
#include "voidscope/text.hpp"

namespace voidscope {

namespace {

std::string Ndjson(const std::vector<Json>& lines) {
  std::string out;
  for (const Json& j : lines) out += DumpLine(j) + "\n";
  return out;
}

template <typename T>
std::string NdjsonOf(std::span<const T> values) {
  std::string out;
  for (const T& v : values) out += DumpLine(Json(v)) + "\n";
  return out;
}

std::string FormatG17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string SafeName(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

std::string MatrixCsv(const SymmetricMatrix& m, std::span<const int> steps) {
  std::string out = "step";
  for (int s : steps) out += "," + std::to_string(s);
  out += "\n";
  for (std::size_t i = 0; i < m.n; ++i) {
    out += std::to_string(steps[i]);
    for (std::size_t j = 0; j < m.n; ++j) out += "," + FormatG17(m.at(i, j));
    out += "\n";
  }
  return out;
}

bool SerpOrder(const SerpRecord& a, const SerpRecord& b) {
  return std::tie(a.wave_id, a.step_index, a.query_text) <
         std::tie(b.wave_id, b.step_index, b.query_text);
}

// Serps grouped by wave, then by query id, each in step order.
using WaveQuerySerps = std::map<std::string, std::map<std::string, std::vector<const SerpRecord*>>>;

WaveQuerySerps GroupSerps(std::span<const SerpRecord> serps) {
  WaveQuerySerps out;
  for (const SerpRecord& s : serps) out[s.wave_id][QueryId(s.query_text)].push_back(&s);
  for (auto& [wave, queries] : out) {
    for (auto& [qid, list] : queries) {
      std::stable_sort(list.begin(), list.end(), [](const SerpRecord* a, const SerpRecord* b) {
        return a->step_index < b->step_index;
      });
    }
  }
  return out;
}

std::uint64_t SeedFor(std::uint64_t seed, std::string_view query_id) {
  const std::string digest = Sha256Hex(query_id);
  return seed ^ std::stoull(digest.substr(0, 16), nullptr, 16);
}

}  // namespace

std::string QueryId(std::string_view text) { return "q" + Sha256Hex(text).substr(0, 12); }

// ---------------------------------------------------------------------------
// Ingest.

IngestOutput IngestPosts(std::string_view input, const EngineRules& rules,
                         std::span<const Lexicon> lexicons, const PerturbationSpec& perturb,
                         std::uint64_t seed) {
  IngestOutput out;
  std::map<std::string, std::size_t> index;
  for (const std::string& raw : text::Split(input, '\n')) {
    const std::string_view line = text::TrimAscii(raw);
    if (line.empty() || line.front() == '#') continue;
    ++out.summary.lines;
    std::string_view url = line;
    std::optional<std::string> posted_at;
    if (const auto tab = line.find('\t'); tab != std::string_view::npos) {
      url = text::TrimAscii(line.substr(0, tab));
      const std::string_view when = text::TrimAscii(line.substr(tab + 1));
      if (!when.empty()) posted_at = std::string(when);
    }
    std::optional<SearchDirective> directive;
    try {
      directive = ExtractDirective(url, rules);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMalformedUrl) throw;
      ++out.summary.malformed;
      continue;
    }
    if (!directive) {
      ++out.summary.not_search;
      continue;
    }
    directive->posted_at = posted_at;
    ++out.summary.directives;
    out.directives.push_back(*directive);

    Query query = NormalizeQuery(directive->raw_query);
    if (query.text.empty()) {
      ++out.summary.empty_queries;
      continue;
    }
    auto [it, inserted] = index.try_emplace(query.text, out.queries.size());
    if (inserted) {
      query.topics = TagLexicons(query, lexicons);
      out.queries.push_back({QueryId(query.text), std::move(query), {}});
    }
    auto& sources = out.queries[it->second].sources;
    if (std::find(sources.begin(), sources.end(), directive->source_url) == sources.end()) {
      sources.push_back(directive->source_url);
    }
  }
  out.summary.unique_queries = out.queries.size();

  std::vector<std::string> kinds;
  if (perturb.pluralize) kinds.push_back("pluralize");
  if (perturb.typo_probability) kinds.push_back("typo");
  if (perturb.quote_toggle) kinds.push_back("quote_toggle");
  if (!kinds.empty()) {
    for (const QueryEntry& e : out.queries) {
      const auto variants = GeneratePerturbations(e.query, perturb, SeedFor(seed, e.query_id));
      for (std::size_t i = 0; i < variants.size() && i < kinds.size(); ++i) {
        out.perturbations.push_back({{"query_id", e.query_id},
                                     {"kind", kinds[i]},
                                     {"text", variants[i].text}});
      }
    }
  }
  return out;
}

Json QueryEntryToJson(const QueryEntry& entry) {
  Json j = entry.query;
  j["query_id"] = entry.query_id;
  j["sources"] = entry.sources;
  return j;
}

QueryEntry QueryEntryFromJson(const Json& j) {
  QueryEntry e;
  e.query = j.get<Query>();
  e.query_id = j.at("query_id").get<std::string>();
  e.sources = j.value("sources", std::vector<std::string>{});
  return e;
}

std::vector<QueryEntry> ReadQueries(const std::filesystem::path& path) {
  std::vector<QueryEntry> out;
  for (const Json& j : ReadNdjson(path)) out.push_back(QueryEntryFromJson(j));
  return out;
}

// ---------------------------------------------------------------------------
// Parse.

ParseOutput ParseCrawl(std::span<const CrawlRecord> records, const BlobStore& blobs,
                       const PublicSuffixList& psl) {
  ParseOutput out;
  for (const CrawlRecord& rec : records) {
    if (rec.gap) {
      ++out.gaps;
      continue;
    }
    SerpRecord serp;
    try {
      serp = ParseSerp(blobs.Get(rec.raw_html_ref));
    } catch (const Error& e) {
      out.quarantine.push_back({{"wave_id", rec.wave_id},
                                {"step_index", rec.step_index},
                                {"query_text", rec.query_text},
                                {"raw_html_ref", rec.raw_html_ref},
                                {"http_status", rec.http_status},
                                {"error", e.what()}});
      continue;
    }
    serp.query_text = rec.query_text;
    serp.fetched_at = rec.fetched_at;
    serp.wave_id = rec.wave_id;
    serp.step_index = rec.step_index;
    for (SearchResult& r : serp.results) r.domain = ExtractDomain(r.url, psl);
    out.serps.push_back(std::move(serp));
  }
  std::stable_sort(out.serps.begin(), out.serps.end(), SerpOrder);
  std::stable_sort(out.quarantine.begin(), out.quarantine.end(), [](const Json& a, const Json& b) {
    return std::make_tuple(a["wave_id"], a["step_index"], a["query_text"]) <
           std::make_tuple(b["wave_id"], b["step_index"], b["query_text"]);
  });
  return out;
}

std::vector<SerpRecord> ReadSerps(const std::filesystem::path& path) {
  std::vector<SerpRecord> out;
  for (const Json& j : ReadNdjson(path)) out.push_back(j.get<SerpRecord>());
  return out;
}

// ---------------------------------------------------------------------------
// Aggregate.

std::vector<AggregateRow> AggregateSerps(std::span<const SerpRecord> serps,
                                         const MetricTables& tables,
                                         const AggregateOptions& options) {
  std::vector<AggregateRow> out;
  out.reserve(serps.size());
  for (const SerpRecord& s : serps) {
    AggregateRow row;
    row.query_id = QueryId(s.query_text);
    row.query_text = s.query_text;
    row.wave_id = s.wave_id;
    row.step_index = s.step_index;
    row.banner_type = s.banner.banner_type;
    row.aggregate = AggregateSerp(s, tables.quality, tables.partisanship, tables.seo,
                                  tables.news, options);
    out.push_back(std::move(row));
  }
  return out;
}

Json AggregateRowToJson(const AggregateRow& row) {
  return {{"query_id", row.query_id},
          {"query_text", row.query_text},
          {"wave_id", row.wave_id},
          {"step_index", row.step_index},
          {"banner_type", BannerTypeName(row.banner_type)},
          {"aggregate", row.aggregate}};
}

AggregateRow AggregateRowFromJson(const Json& j) {
  AggregateRow row;
  row.query_id = j.at("query_id").get<std::string>();
  row.query_text = j.at("query_text").get<std::string>();
  row.wave_id = j.at("wave_id").get<std::string>();
  row.step_index = j.at("step_index").get<int>();
  const std::string banner = j.at("banner_type").get<std::string>();
  auto type = BannerTypeFromName(banner);
  if (!type) throw Error(ErrorCode::kParse, "unknown banner_type '" + banner + "'");
  row.banner_type = *type;
  row.aggregate = j.at("aggregate").get<SerpAggregate>();
  return row;
}

std::vector<AggregateRow> ReadAggregates(const std::filesystem::path& path) {
  std::vector<AggregateRow> out;
  for (const Json& j : ReadNdjson(path)) out.push_back(AggregateRowFromJson(j));
  return out;
}

// ---------------------------------------------------------------------------
// Stability.

StabilityOutput AnalyzeStability(std::span<const SerpRecord> serps,
                                 const StabilityParams& params) {
  StabilityOutput out;
  const WaveQuerySerps grouped = GroupSerps(serps);
  Json waves = Json::array();
  // Per wave: query id -> URLs at its first observed step, for churn.
  std::map<std::string, std::map<std::string, std::set<std::string>>> first_urls;

  for (const auto& [wave, queries] : grouped) {
    Json w = {{"wave_id", wave}, {"queries_observed", queries.size()}};
    std::vector<RboMatrix> matrices;
    std::vector<std::string> skipped;
    std::map<std::string, std::string> groups;
    std::map<int, std::set<std::string>> bannered_by_step;
    std::set<int> steps;
    std::map<std::string, int> band_sizes;

    for (const auto& [qid, list] : queries) {
      std::vector<ObservedList> observed;
      int banner_count = 0;
      for (const SerpRecord* s : list) {
        observed.push_back({s->step_index, s->RankedUrls()});
        steps.insert(s->step_index);
        if (s->banner.banner_type == BannerType::kLowQuality) {
          ++banner_count;
          bannered_by_step[s->step_index].insert(qid);
        }
      }
      const auto& urls = observed.front().urls;
      first_urls[wave][qid] = std::set<std::string>(urls.begin(), urls.end());
      if (observed.size() < 2) {
        skipped.push_back(qid);
        continue;
      }
      groups[qid] = BandLabel(params.band_edges, banner_count);
      ++band_sizes[groups[qid]];
      matrices.push_back(BuildRboMatrix(qid, std::move(observed), params.depth));
    }
    w["skipped_queries"] = skipped;
    if (matrices.empty()) {
      w["stability"] = nullptr;
      w["note"] = "no query has two observed timesteps";
    } else {
      w["stability"] = ComputeStability(matrices, params.window_max, groups);
      w["band_sizes"] = band_sizes;
      for (const RboMatrix& m : matrices) {
        out.matrices[SafeName(wave) + "/rbo_" + m.query_id + ".csv"] = MatrixCsv(m.x, m.steps);
      }
    }
    if (steps.size() >= 2) {
      std::vector<int> step_list(steps.begin(), steps.end());
      std::vector<std::set<std::string>> series;
      for (int s : step_list) series.push_back(bannered_by_step[s]);
      const SymmetricMatrix jm = JaccardMatrix(series);
      double sum = 0;
      for (std::size_t i = 0; i + 1 < jm.n; ++i) sum += jm.at(i, i + 1);
      w["banner_jaccard_adjacent_mean"] = sum / static_cast<double>(jm.n - 1);
      out.matrices[SafeName(wave) + "/jaccard_low_quality.csv"] = MatrixCsv(jm, step_list);
    }
    waves.push_back(std::move(w));
  }

  Json churn = Json::array();
  for (auto a = first_urls.begin(); a != first_urls.end(); ++a) {
    auto b = std::next(a);
    if (b == first_urls.end()) break;
    Json c = {{"wave_a", a->first}, {"wave_b", b->first}};
    try {
      c["churn"] = UrlChurn(a->second, b->second);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyInput) throw;
      c["churn"] = nullptr;
      c["note"] = "waves share no query";
    }
    churn.push_back(std::move(c));
  }
  out.report = {{"waves", waves}, {"churn", churn}};
  return out;
}

// ---------------------------------------------------------------------------
// Banner explanations.

Json ExplainBanners(std::span<const SerpRecord> serps, const ExplainParams& params) {
  const WaveQuerySerps grouped = GroupSerps(serps);
  auto bannered = [&](const SerpRecord& s) {
    return params.banner == ExplainBanner::kLowQuality
               ? s.banner.banner_type == BannerType::kLowQuality
               : s.banner.banner_type != BannerType::kNone;
  };
  Json timelines = Json::array();
  std::size_t always = 0, never = 0, total = 0;
  std::size_t by_single = 0, by_pair = 0, by_triple = 0, by_any_cutoff = 0;
  std::map<int, std::size_t> by_cutoff;
  for (int c = params.cutoff_min; c <= params.cutoff_max; ++c) by_cutoff[c] = 0;

  for (const auto& [wave, queries] : grouped) {
    for (const auto& [qid, list] : queries) {
      ++total;
      BannerTimeline t;
      t.query_id = qid;
      std::vector<int> s_steps, r_steps;
      for (const SerpRecord* s : list) {
        if (bannered(*s)) {
          t.bannered.push_back(s->RankedUrls());
          s_steps.push_back(s->step_index);
        } else {
          t.unbannered.push_back(s->RankedUrls());
          r_steps.push_back(s->step_index);
        }
      }
      if (t.unbannered.empty()) ++always;
      if (t.bannered.empty()) ++never;
      if (t.bannered.empty() || t.unbannered.empty()) continue;

      Json j = {{"query_id", qid},
                {"query_text", list.front()->query_text},
                {"wave_id", wave},
                {"bannered_steps", s_steps},
                {"unbannered_steps", r_steps}};
      const auto singles = SingleUrlExplanation(t);
      j["single_urls"] = singles;
      Json pairs = Json::array();
      for (const auto& [a, b] : PairExplanation(t, params.pair_mode)) pairs.push_back({a, b});
      j["pairs"] = pairs;
      const bool single = !singles.empty();
      const bool pair = params.max_order >= 2 && ExplainedByPair(t, params.pair_mode);
      j["explained_single"] = single;
      if (params.max_order >= 2) j["explained_pair"] = pair;
      bool triple = false;
      if (params.max_order >= 3) {
        triple = single || pair || !OrderExplanation(t, 3).empty();
        j["explained_triple"] = triple;
      }
      Json conditions_by_cutoff = Json::object();
      std::vector<int> explained_cutoffs;
      for (int c = params.cutoff_min; c <= params.cutoff_max; ++c) {
        if (!ExplainedAtCutoff(t, c)) continue;
        explained_cutoffs.push_back(c);
        ++by_cutoff[c];
        conditions_by_cutoff[std::to_string(c)] = RankCutoffExplanation(t, c).size();
      }
      j["explained_cutoffs"] = explained_cutoffs;
      j["conditions_by_cutoff"] = conditions_by_cutoff;
      if (!explained_cutoffs.empty()) {
        const int c = explained_cutoffs.front();
        j["min_cutoff"] = c;
        j["conditions_at_min_cutoff"] = RankCutoffExplanation(t, c);
        ++by_any_cutoff;
      } else {
        j["min_cutoff"] = nullptr;
      }
      Json tally = Json::object();
      for (const auto& [url, n] : CooccurrenceTally(t)) tally[url] = n;
      j["tally"] = tally;

      by_single += single;
      by_pair += pair;
      by_triple += triple;
      timelines.push_back(std::move(j));
    }
  }
  Json summary = {{"queries", total},
                  {"always_bannered", always},
                  {"never_bannered", never},
                  {"with_variance", timelines.size()},
                  {"explained_single", by_single}};
  if (params.max_order >= 2) summary["explained_pair"] = by_pair;
  if (params.max_order >= 3) summary["explained_triple"] = by_triple;
  Json cut = Json::object();
  for (const auto& [c, n] : by_cutoff) cut[std::to_string(c)] = n;
  summary["explained_at_cutoff"] = cut;
  summary["explained_at_any_cutoff"] = by_any_cutoff;
  return {{"banner", params.banner == ExplainBanner::kLowQuality ? "low_quality" : "any"},
          {"pair_mode", params.pair_mode == PairMode::kJoint ? "joint" : "independent"},
          {"cutoff_min", params.cutoff_min},
          {"cutoff_max", params.cutoff_max},
          {"summary", summary},
          {"timelines", timelines}};
}

// ---------------------------------------------------------------------------
// Regression.

Json FitLogitStage(std::span<const AggregateRow> rows, std::span<const QueryEntry> queries,
                   const LogitStageParams& params) {
  std::map<std::string, const Query*> by_id;
  for (const QueryEntry& e : queries) by_id[e.query_id] = &e.query;

  std::vector<const AggregateRow*> selected;
  if (params.rows == LogitRows::kAllSteps) {
    for (const AggregateRow& r : rows) selected.push_back(&r);
  } else {
    std::map<std::pair<std::string, std::string>, const AggregateRow*> first;
    for (const AggregateRow& r : rows) {
      auto& slot = first[{r.wave_id, r.query_id}];
      if (slot == nullptr || r.step_index < slot->step_index) slot = &r;
    }
    for (const auto& [key, r] : first) selected.push_back(r);
  }

  std::vector<std::vector<double>> x;
  std::vector<int> y;
  std::map<std::string, int> dropped;
  for (const AggregateRow* r : selected) {
    auto q = by_id.find(r->query_id);
    if (q == by_id.end()) {
      ++dropped["unknown_query"];
      continue;
    }
    const bool label = params.target == LogitTarget::kLowQuality
                           ? r->banner_type == BannerType::kLowQuality
                           : IsLowRelevance(r->banner_type);
    std::string reason;
    auto row = AssembleFeatures(*q->second, r->aggregate, params.target, label, &reason);
    if (!row) {
      ++dropped[reason];
      continue;
    }
    x.push_back(std::move(row->x));
    y.push_back(row->y);
  }

  Json card = {{"target", LogitTargetName(params.target)},
               {"rows", params.rows == LogitRows::kFirstStep ? "first_step" : "all_steps"},
               {"candidates", selected.size()},
               {"used", x.size()},
               {"dropped", dropped},
               {"positives", std::count(y.begin(), y.end(), 1)},
               {"feature_names", FeatureNames(params.target)}};
  try {
    const LogitModel model = FitL1Logit(x, y, params.options, FeatureNames(params.target));
    card["model"] = model;
    Json named = Json::object();
    for (std::size_t i = 0; i < model.coefficients.size(); ++i) {
      named[model.feature_names[i]] = model.coefficients[i];
    }
    card["coefficients_by_name"] = named;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingleClass && e.code() != ErrorCode::kEmptyInput) throw;
    card["model"] = nullptr;
    card["error"] = e.what();
  }
  return card;
}

// ---------------------------------------------------------------------------
// Report.

namespace {

std::string Percent(std::int64_t part, std::int64_t whole) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4f%%",
                whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole));
  return buf;
}

}  // namespace

ReportOutput BuildReport(std::span<const AggregateRow> rows,
                         const std::map<std::string, double>& confidences,
                         const ReportParams& params) {
  ReportOutput out;
  for (const AggregateRow& r : rows) {
    VoidLabel l;
    l.query_id = r.query_id;
    l.wave_id = r.wave_id;
    l.step_index = r.step_index;
    l.banner_type = r.banner_type;
    l.by_banner = r.banner_type == BannerType::kLowQuality;
    l.by_quality = ClassifyVoidByQuality(r.aggregate, params.quality_threshold, params.comparator);
    if (auto c = confidences.find(r.query_id); c != confidences.end()) {
      l.by_model = ClassifyVoidByModel(c->second, params.model_threshold);
      l.model_confidence = c->second;
    }
    out.labels.push_back(std::move(l));
  }
  out.prevalence = BuildPrevalenceReport(out.labels, params.extrapolation);
  out.report = {{"settings",
                 {{"quality_threshold", params.quality_threshold},
                  {"comparator", params.comparator == Comparator::kLessOrEqual ? "le" : "lt"},
                  {"model_threshold", params.model_threshold},
                  {"model_predictions", confidences.size()}}},
                {"prevalence", out.prevalence}};

  std::string t = "Banner prevalence by wave\n\n" + FormatBannerTable(out.prevalence) + "\n";
  t += "Void definitions\n";
  for (const WaveStats& w : out.prevalence.waves) {
    t += "\n" + w.wave_id + " (" + text::WithThousands(w.total) + " SERPs)\n";
    for (const auto& [name, d] : w.definitions) {
      t += "  " + name + ": ";
      if (d.labeled == 0) {
        t += "not labeled\n";
        continue;
      }
      t += text::WithThousands(d.voids) + " voids in " + text::WithThousands(d.labeled) +
           " labeled SERPs (" + Percent(d.voids, d.labeled) + "); " +
           text::WithThousands(d.bannered_voids) + " of them bannered";
      if (d.voids_bannered) t += " (" + Percent(d.bannered_voids, d.voids) + ")";
      t += "\n";
    }
  }
  if (out.prevalence.extrapolation) {
    const Extrapolation& e = *out.prevalence.extrapolation;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "\nExtrapolation: %.6g daily searches x %.6g void rate = %.6g daily voids; "
                  "%.6g bannered\n",
                  e.inputs.daily_searches, e.inputs.void_rate, e.daily_voids,
                  e.bannered_daily_voids);
    t += buf;
  }
  out.text = std::move(t);
  return out;
}

// ---------------------------------------------------------------------------
// Model interfaces.

std::vector<Json> ExportModelData(std::span<const SerpRecord> serps,
                                  std::span<const QueryEntry> queries) {
  std::map<std::string, std::vector<const SerpRecord*>> by_query;
  for (const SerpRecord& s : serps) by_query[QueryId(s.query_text)].push_back(&s);
  for (auto& [qid, list] : by_query) {
    std::stable_sort(list.begin(), list.end(), [](const SerpRecord* a, const SerpRecord* b) {
      return std::tie(a->wave_id, a->step_index) < std::tie(b->wave_id, b->step_index);
    });
  }
  auto line = [&](const std::string& qid, const std::string& text) {
    Json j = {{"query_id", qid}, {"query_text", text}};
    Json list = Json::array();
    bool label = false;
    if (auto it = by_query.find(qid); it != by_query.end()) {
      for (const SerpRecord* s : it->second) {
        label = label || s->banner.banner_type == BannerType::kLowQuality;
        Json results = Json::array();
        for (const SearchResult& r : s->results) {
          results.push_back({{"rank", r.rank},
                             {"domain", r.domain},
                             {"title", r.title},
                             {"result_type", ResultTypeName(r.result_type)}});
        }
        list.push_back({{"wave_id", s->wave_id},
                        {"step_index", s->step_index},
                        {"banner_type", BannerTypeName(s->banner.banner_type)},
                        {"results", results}});
      }
    }
    j["label_low_quality"] = label;
    j["serps"] = list;
    return j;
  };
  std::vector<Json> out;
  std::set<std::string> seen;
  for (const QueryEntry& e : queries) {
    if (!seen.insert(e.query_id).second) continue;
    out.push_back(line(e.query_id, e.query.text));
  }
  for (const auto& [qid, list] : by_query) {
    if (seen.insert(qid).second) out.push_back(line(qid, list.front()->query_text));
  }
  return out;
}

std::vector<std::pair<std::string, double>> ImportModelPreds(std::string_view csv,
                                                             const std::set<std::string>& known) {
  auto rows = ParseConfidenceCsv(csv);
  std::set<std::string> seen;
  std::vector<std::string> unknown;
  for (const auto& [qid, conf] : rows) {
    if (!seen.insert(qid).second) {
      throw Error(ErrorCode::kDuplicateConflict, "query_id '" + qid + "' appears twice");
    }
    if (!known.empty() && !known.count(qid)) unknown.push_back(qid);
  }
  if (!unknown.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::to_string(unknown.size()) + " unknown query_id(s), first '" +
                    unknown.front() + "'");
  }
  return rows;
}

std::map<std::string, double> ReadModelPreds(const std::filesystem::path& path) {
  std::map<std::string, double> out;
  for (const Json& j : ReadNdjson(path)) {
    out[j.at("query_id").get<std::string>()] = j.at("confidence").get<double>();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runner.

Pipeline::Pipeline(PipelineConfig config, std::ostream* log)
    : config_(std::move(config)), config_hash_(ConfigHash(config_)), log_(log) {}

const std::vector<std::string>& Pipeline::StageNames() {
  static const std::vector<std::string> kNames = {
      "ingest",    "crawl", "parse",           "aggregate",          "stability",
      "explain",   "logit", "export-model-data", "import-model-preds", "report"};
  return kNames;
}

std::string Pipeline::ArtifactName(std::string_view artifact) {
  static const std::map<std::string, std::string, std::less<>> kNames = {
      {"directives", "ingest/directives.ndjson"},
      {"queries", "ingest/queries.ndjson"},
      {"perturbations", "ingest/perturbations.ndjson"},
      {"ingest_summary", "ingest/summary.json"},
      {"plan", "crawl/plan.json"},
      {"store", "crawl/store"},
      {"manifest", "crawl/store/manifest.ndjson"},
      {"crawl_summary", "crawl/summary.json"},
      {"serps", "parse/serps.ndjson"},
      {"quarantine", "parse/quarantine.ndjson"},
      {"parse_summary", "parse/summary.json"},
      {"aggregates", "aggregate/aggregates.ndjson"},
      {"aggregate_summary", "aggregate/summary.json"},
      {"stability", "stability/stability.json"},
      {"stability_matrices", "stability/matrices"},
      {"explain", "explain/explain.json"},
      {"logit_low_quality", "logit/low_quality.json"},
      {"logit_low_relevance", "logit/low_relevance.json"},
      {"model_data", "models/model_data.ndjson"},
      {"model_preds", "models/preds.ndjson"},
      {"report", "report/report.json"},
      {"report_text", "report/report.txt"},
      {"void_labels", "report/void_labels.ndjson"},
  };
  auto it = kNames.find(artifact);
  if (it == kNames.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown artifact '" + std::string(artifact) + "'");
  }
  return it->second;
}

std::filesystem::path Pipeline::ArtifactPath(std::string_view artifact) const {
  return config_.work_dir / ArtifactName(artifact);
}

Json Pipeline::Provenance(const std::map<std::string, std::string>& inputs) const {
  return {{"toolkit_version", VOIDSCOPE_VERSION},
          {"config_hash", config_hash_},
          {"seed", config_.seed},
          {"inputs", inputs}};
}

std::string Pipeline::Fingerprint(const std::map<std::string, std::string>& inputs) const {
  return Sha256Hex(DumpLine(Provenance(inputs)));
}

std::filesystem::path Pipeline::Require(std::string_view artifact,
                                        std::string_view producer) const {
  const auto path = ArtifactPath(artifact);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingDependency,
                ArtifactName(artifact) + " not found in " + config_.work_dir.string() +
                    "; run the '" + std::string(producer) + "' stage first");
  }
  return path;
}

std::filesystem::path Pipeline::RequireInput(const std::filesystem::path& path,
                                             std::string_view key) const {
  if (path.empty()) {
    throw Error(ErrorCode::kConfig, std::string(key) + " is not set");
  }
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kConfig, std::string(key) + ": no such file " + path.string());
  }
  return path;
}

bool Pipeline::UpToDate(std::string_view stage, const std::string& fingerprint) const {
  const auto state_path = config_.work_dir / "state" / (std::string(stage) + ".json");
  if (!std::filesystem::exists(state_path)) return false;
  Json state;
  try {
    state = Json::parse(ReadTextFile(state_path));
  } catch (const std::exception&) {
    return false;
  }
  if (state.value("fingerprint", std::string()) != fingerprint) return false;
  for (const auto& [rel, digest] : state.at("outputs").items()) {
    const auto p = config_.work_dir / rel;
    if (!std::filesystem::exists(p) || Sha256File(p) != digest.get<std::string>()) return false;
  }
  return true;
}

void Pipeline::SaveState(std::string_view stage, const std::string& fingerprint,
                         const std::vector<std::string>& outputs) const {
  Json hashes = Json::object();
  for (const std::string& rel : outputs) hashes[rel] = Sha256File(config_.work_dir / rel);
  const Json state = {{"stage", stage}, {"fingerprint", fingerprint}, {"outputs", hashes}};
  WriteArtifact("state/" + std::string(stage) + ".json", DumpPretty(state));
}

void Pipeline::WriteArtifact(const std::string& relative, std::string_view content) const {
  const auto path = config_.work_dir / relative;
  std::filesystem::create_directories(path.parent_path());
  WriteFileAtomic(path, content);
}

PublicSuffixList Pipeline::LoadPsl() const {
  return config_.psl.empty() ? PublicSuffixList::Default() : PublicSuffixList::LoadFile(config_.psl);
}

StageOutcome Pipeline::RunStage(std::string_view stage) {
  StageOutcome outcome;
  if (stage == "ingest") {
    outcome = Ingest();
  } else if (stage == "crawl") {
    outcome = Crawl();
  } else if (stage == "parse") {
    outcome = Parse();
  } else if (stage == "aggregate") {
    outcome = Aggregate();
  } else if (stage == "stability") {
    outcome = Stability();
  } else if (stage == "explain") {
    outcome = Explain();
  } else if (stage == "logit") {
    outcome = Logit();
  } else if (stage == "import-model-preds") {
    outcome = ImportPreds();
  } else if (stage == "report") {
    outcome = Report();
  } else if (stage == "export-model-data") {
    outcome = Export();
  } else {
    throw Error(ErrorCode::kConfig, "unknown stage '" + std::string(stage) + "'");
  }
  outcome.stage = std::string(stage);
  if (log_) {
    *log_ << "[" << stage << "] " << (outcome.skipped ? "up to date" : outcome.message) << "\n";
  }
  return outcome;
}

std::vector<StageOutcome> Pipeline::Run(std::span<const std::string> stages) {
  ValidateConfig(config_);
  std::vector<StageOutcome> out;
  for (const std::string& s : stages) out.push_back(RunStage(s));
  return out;
}

std::vector<StageOutcome> Pipeline::RunAll() { return Run(StageNames()); }

StageOutcome Pipeline::Ingest() {
  const auto posts = RequireInput(config_.directives, "ingest.directives");
  const auto lexicons = RequireInput(config_.lexicons, "ingest.lexicons");
  std::map<std::string, std::string> inputs = {{"directives", Sha256File(posts)},
                                               {"lexicons", Sha256File(lexicons)}};
  if (!config_.engine_rules.empty()) {
    inputs["engine_rules"] = Sha256File(RequireInput(config_.engine_rules, "ingest.engine_rules"));
  }
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("ingest", fp)) return {"", true, ""};

  const EngineRules rules = config_.engine_rules.empty()
                                ? EngineRules::Default()
                                : EngineRules::LoadFile(config_.engine_rules);
  const auto lex = LoadLexiconCsv(lexicons);
  const IngestOutput out =
      IngestPosts(ReadTextFile(posts), rules, lex, config_.perturb, config_.seed);

  std::vector<Json> queries;
  for (const QueryEntry& e : out.queries) queries.push_back(QueryEntryToJson(e));
  const Json summary = {{"provenance", Provenance(inputs)},
                        {"lines", out.summary.lines},
                        {"directives", out.summary.directives},
                        {"not_search", out.summary.not_search},
                        {"malformed", out.summary.malformed},
                        {"empty_queries", out.summary.empty_queries},
                        {"unique_queries", out.summary.unique_queries},
                        {"perturbations", out.perturbations.size()}};
  const std::vector<std::string> outputs = {
      ArtifactName("directives"), ArtifactName("queries"), ArtifactName("perturbations"),
      ArtifactName("ingest_summary")};
  WriteArtifact(outputs[0], NdjsonOf<SearchDirective>(out.directives));
  WriteArtifact(outputs[1], Ndjson(queries));
  WriteArtifact(outputs[2], Ndjson(out.perturbations));
  WriteArtifact(outputs[3], DumpPretty(summary));
  SaveState("ingest", fp, outputs);
  return {"", false,
          std::to_string(out.summary.unique_queries) + " queries from " +
              std::to_string(out.summary.directives) + " directives (" +
              std::to_string(out.summary.malformed) + " malformed, " +
              std::to_string(out.summary.not_search) + " not searches)"};
}

StageOutcome Pipeline::Crawl() {
  const auto queries_path = Require("queries", "ingest");
  std::map<std::string, std::string> inputs = {{"queries", Sha256File(queries_path)}};
  if (config_.fetcher == "replay") {
    const auto dir = RequireInput(config_.replay_dir, "crawl.replay_dir");
    inputs["replay_index"] = Sha256File(RequireInput(dir / "index.ndjson", "crawl.replay_dir"));
  }
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("crawl", fp)) return {"", true, ""};

  std::vector<Query> queries;
  for (const QueryEntry& e : ReadQueries(queries_path)) queries.push_back(e.query);
  CrawlConfig cc;
  cc.wave_id = config_.wave_id;
  cc.cadence = config_.cadence;
  cc.results_per_query = config_.results_per_query;
  cc.politeness_delay_ms = config_.delay_ms;
  cc.location_label = config_.location_label;
  cc.engine = config_.engine;
  const CrawlPlan plan = ScheduleWave(queries, cc);
  Json plan_json = plan;
  plan_json["provenance"] = Provenance(inputs);
  WriteArtifact(ArtifactName("plan"), DumpPretty(plan_json));

  CrawlStore store(ArtifactPath("store"));
  store.manifest.RepairTail();
  std::unique_ptr<Fetcher> fetcher;
  std::unique_ptr<CrawlClock> clock;
  if (config_.fetcher == "replay") {
    fetcher = std::make_unique<ReplayFetcher>(config_.replay_dir);
    clock = std::make_unique<VirtualClock>(ParseUtc(config_.crawl_start));
  } else {
    fetcher = std::make_unique<HttpFetcher>(HttpFetcherOptions::FromEnvironment());
    clock = std::make_unique<SystemClock>();
  }
  RetryPolicy retry;
  retry.max_attempts = config_.max_attempts;
  retry.initial_backoff = std::chrono::milliseconds(config_.backoff_ms);
  const CrawlSummary summary = RunCrawl(plan, *fetcher, store, *clock, retry,
                                        [this](const CrawlRecord& r) {
                                          if (log_ && r.gap) {
                                            *log_ << "[crawl] gap: step " << r.step_index
                                                  << " '" << r.query_text << "' (status "
                                                  << r.http_status << ")\n";
                                          }
                                        });
  const std::vector<std::string> outputs = {ArtifactName("plan"), ArtifactName("manifest")};
  SaveState("crawl", fp, outputs);
  return {"", false,
          std::to_string(summary.fetched) + " fetched, " + std::to_string(summary.skipped) +
              " already stored, " + std::to_string(summary.gaps) + " gaps"};
}

StageOutcome Pipeline::Parse() {
  const auto manifest = Require("manifest", "crawl");
  std::map<std::string, std::string> inputs = {{"manifest", Sha256File(manifest)}};
  if (!config_.psl.empty()) inputs["psl"] = Sha256File(RequireInput(config_.psl, "tables.psl"));
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("parse", fp)) return {"", true, ""};

  const CrawlStore store(ArtifactPath("store"));
  const auto records = store.manifest.Load();
  const ParseOutput out = ParseCrawl(records, store.blobs, LoadPsl());
  const Json summary = {{"provenance", Provenance(inputs)},
                        {"records", records.size()},
                        {"serps", out.serps.size()},
                        {"gaps", out.gaps},
                        {"quarantined", out.quarantine.size()}};
  const std::vector<std::string> outputs = {ArtifactName("serps"), ArtifactName("quarantine"),
                                            ArtifactName("parse_summary")};
  WriteArtifact(outputs[0], NdjsonOf<SerpRecord>(out.serps));
  WriteArtifact(outputs[1], Ndjson(out.quarantine));
  WriteArtifact(outputs[2], DumpPretty(summary));
  SaveState("parse", fp, outputs);
  if (log_ && !out.quarantine.empty()) {
    *log_ << "[parse] warning: " << out.quarantine.size() << " pages quarantined, see "
          << outputs[1] << "\n";
  }
  return {"", false,
          std::to_string(out.serps.size()) + " SERPs, " + std::to_string(out.gaps) + " gaps, " +
              std::to_string(out.quarantine.size()) + " quarantined"};
}

StageOutcome Pipeline::Aggregate() {
  const auto serps_path = Require("serps", "parse");
  const auto quality = RequireInput(config_.quality, "tables.quality");
  const auto partisanship = RequireInput(config_.partisanship, "tables.partisanship");
  const auto seo = RequireInput(config_.seo, "tables.seo");
  const auto news = RequireInput(config_.news, "tables.news");
  const std::map<std::string, std::string> inputs = {{"serps", Sha256File(serps_path)},
                                                     {"quality", Sha256File(quality)},
                                                     {"partisanship", Sha256File(partisanship)},
                                                     {"seo", Sha256File(seo)},
                                                     {"news", Sha256File(news)}};
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("aggregate", fp)) return {"", true, ""};

  MetricTables tables;
  tables.quality = LoadQualityScores(ReadTextFile(quality));
  tables.partisanship = LoadPartisanship(ReadTextFile(partisanship));
  tables.seo = LoadSeo(ReadTextFile(seo));
  tables.news = LoadNewsList(ReadTextFile(news));
  AggregateOptions options;
  options.quality_mean = config_.quality_mean;
  const auto serps = ReadSerps(serps_path);
  const auto rows = AggregateSerps(serps, tables, options);

  std::vector<Json> lines;
  std::size_t without_quality = 0;
  for (const AggregateRow& r : rows) {
    lines.push_back(AggregateRowToJson(r));
    without_quality += !r.aggregate.avg_domain_quality.has_value();
  }
  const Json summary = {{"provenance", Provenance(inputs)},
                        {"rows", rows.size()},
                        {"without_quality", without_quality},
                        {"quality_mean", config_.quality_mean == QualityMean::kInstance
                                             ? "instance"
                                             : "unique_domain"}};
  const std::vector<std::string> outputs = {ArtifactName("aggregates"),
                                            ArtifactName("aggregate_summary")};
  WriteArtifact(outputs[0], Ndjson(lines));
  WriteArtifact(outputs[1], DumpPretty(summary));
  SaveState("aggregate", fp, outputs);
  return {"", false, std::to_string(rows.size()) + " SERP aggregates"};
}

StageOutcome Pipeline::Stability() {
  const auto serps_path = Require("serps", "parse");
  const std::map<std::string, std::string> inputs = {{"serps", Sha256File(serps_path)}};
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("stability", fp)) return {"", true, ""};

  StabilityParams params;
  params.window_max = config_.window_max;
  params.depth = config_.rbo_depth;
  params.band_edges = config_.band_edges;
  const auto serps = ReadSerps(serps_path);
  StabilityOutput out = AnalyzeStability(serps, params);
  out.report["provenance"] = Provenance(inputs);

  std::filesystem::remove_all(ArtifactPath("stability_matrices"));
  std::vector<std::string> outputs = {ArtifactName("stability")};
  WriteArtifact(outputs[0], DumpPretty(out.report));
  for (const auto& [name, csv] : out.matrices) {
    outputs.push_back(ArtifactName("stability_matrices") + "/" + name);
    WriteArtifact(outputs.back(), csv);
  }
  SaveState("stability", fp, outputs);
  return {"", false, std::to_string(out.matrices.size()) + " matrices"};
}

StageOutcome Pipeline::Explain() {
  const auto serps_path = Require("serps", "parse");
  const std::map<std::string, std::string> inputs = {{"serps", Sha256File(serps_path)}};
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("explain", fp)) return {"", true, ""};

  ExplainParams params;
  params.cutoff_min = config_.cutoff_min;
  params.cutoff_max = config_.cutoff_max;
  params.max_order = config_.max_order;
  params.pair_mode = config_.pair_mode;
  params.banner = config_.explain_banner;
  const auto serps = ReadSerps(serps_path);
  Json out = ExplainBanners(serps, params);
  out["provenance"] = Provenance(inputs);
  const std::vector<std::string> outputs = {ArtifactName("explain")};
  WriteArtifact(outputs[0], DumpPretty(out));
  SaveState("explain", fp, outputs);
  return {"", false,
          std::to_string(out["summary"]["with_variance"].get<std::size_t>()) +
              " queries with banner variance"};
}

StageOutcome Pipeline::Logit() {
  const auto aggregates = Require("aggregates", "aggregate");
  const auto queries_path = Require("queries", "ingest");
  const std::map<std::string, std::string> inputs = {{"aggregates", Sha256File(aggregates)},
                                                     {"queries", Sha256File(queries_path)}};
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("logit", fp)) return {"", true, ""};

  const auto rows = ReadAggregates(aggregates);
  const auto queries = ReadQueries(queries_path);
  std::vector<std::string> outputs;
  std::string message;
  for (LogitTarget target : config_.logit_targets) {
    LogitStageParams params;
    params.target = target;
    params.rows = config_.logit_rows;
    params.options.alpha = config_.alpha;
    params.options.standardize = config_.standardize;
    Json card = FitLogitStage(rows, queries, params);
    card["provenance"] = Provenance(inputs);
    const std::string name = ArtifactName("logit_" + std::string(LogitTargetName(target)));
    WriteArtifact(name, DumpPretty(card));
    outputs.push_back(name);
    if (!message.empty()) message += "; ";
    message += std::string(LogitTargetName(target)) + ": ";
    if (card.contains("error")) {
      message += card["error"].get<std::string>();
    } else {
      message += std::to_string(card["used"].get<std::size_t>()) + " rows, converged=" +
                 (card["model"]["converged"].get<bool>() ? "true" : "false");
    }
  }
  SaveState("logit", fp, outputs);
  return {"", false, message};
}

StageOutcome Pipeline::ImportPreds() {
  const auto preds_path = ArtifactPath("model_preds");
  if (config_.model_preds.empty()) {
    std::filesystem::remove(preds_path);
    return {"", false, "no report.model_preds configured"};
  }
  const auto csv = RequireInput(config_.model_preds, "report.model_preds");
  const auto queries_path = Require("queries", "ingest");
  const std::map<std::string, std::string> inputs = {{"model_preds", Sha256File(csv)},
                                                     {"queries", Sha256File(queries_path)}};
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("import-model-preds", fp)) return {"", true, ""};

  std::set<std::string> known;
  for (const QueryEntry& e : ReadQueries(queries_path)) known.insert(e.query_id);
  const auto rows = ImportModelPreds(ReadTextFile(csv), known);
  std::vector<Json> lines;
  for (const auto& [qid, conf] : rows) lines.push_back({{"query_id", qid}, {"confidence", conf}});
  const std::vector<std::string> outputs = {ArtifactName("model_preds")};
  WriteArtifact(outputs[0], Ndjson(lines));
  SaveState("import-model-preds", fp, outputs);
  return {"", false, std::to_string(rows.size()) + " predictions"};
}

StageOutcome Pipeline::Report() {
  const auto aggregates = Require("aggregates", "aggregate");
  std::map<std::string, std::string> inputs = {{"aggregates", Sha256File(aggregates)}};
  std::map<std::string, double> confidences;
  if (!config_.model_preds.empty()) {
    const auto preds = Require("model_preds", "import-model-preds");
    inputs["model_preds"] = Sha256File(preds);
    confidences = ReadModelPreds(preds);
  }
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("report", fp)) return {"", true, ""};

  ReportParams params;
  params.quality_threshold = config_.quality_threshold;
  params.comparator = config_.comparator;
  params.model_threshold = config_.model_threshold;
  params.extrapolation = config_.extrapolation;
  const auto rows = ReadAggregates(aggregates);
  ReportOutput out = BuildReport(rows, confidences, params);
  out.report["provenance"] = Provenance(inputs);
  const std::vector<std::string> outputs = {ArtifactName("report"), ArtifactName("report_text"),
                                            ArtifactName("void_labels")};
  WriteArtifact(outputs[0], DumpPretty(out.report));
  WriteArtifact(outputs[1], out.text);
  WriteArtifact(outputs[2], NdjsonOf<VoidLabel>(out.labels));
  SaveState("report", fp, outputs);
  return {"", false, std::to_string(out.labels.size()) + " labeled SERPs"};
}

StageOutcome Pipeline::Export() {
  const auto serps_path = Require("serps", "parse");
  const auto queries_path = Require("queries", "ingest");
  const std::map<std::string, std::string> inputs = {{"serps", Sha256File(serps_path)},
                                                     {"queries", Sha256File(queries_path)}};
  const std::string fp = Fingerprint(inputs);
  if (UpToDate("export-model-data", fp)) return {"", true, ""};

  const auto lines = ExportModelData(ReadSerps(serps_path), ReadQueries(queries_path));
  const std::vector<std::string> outputs = {ArtifactName("model_data")};
  WriteArtifact(outputs[0], Ndjson(lines));
  SaveState("export-model-data", fp, outputs);
  return {"", false, std::to_string(lines.size()) + " queries exported"};
}

}  // namespace voidscope
