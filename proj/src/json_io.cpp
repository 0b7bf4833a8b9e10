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

#include "voidscope/json_io.hpp"

#include "voidscope/error.hpp"
#include "voidscope/io.hpp"
#include "voidscope/text.hpp"

namespace voidscope {

namespace {

template <typename T>
Json Opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> GetOpt(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

Json Series(const std::map<int, double>& m) {
  Json out = Json::array();
  for (const auto& [k, v] : m) out.push_back(v);
  return out;
}

}  // namespace

void to_json(Json& j, const OperatorSet& v) {
  j = Json::object();
  for (int i = 0; i < kOperatorCount; ++i) {
    j[std::string(OperatorName(static_cast<Operator>(i)))] = v.counts[i];
  }
}

void from_json(const Json& j, OperatorSet& v) {
  for (int i = 0; i < kOperatorCount; ++i) {
    v.counts[i] = j.value(std::string(OperatorName(static_cast<Operator>(i))), 0);
  }
}

void to_json(Json& j, const TopicTags& v) {
  Json terms = Json::array();
  for (const auto& m : v.matched_terms) terms.push_back({{"lexicon_id", m.lexicon_id}, {"term", m.term}});
  j = {{"political", v.political}, {"conspiracy", v.conspiracy}, {"matched_terms", terms}};
}

void from_json(const Json& j, TopicTags& v) {
  v.political = j.at("political").get<bool>();
  v.conspiracy = j.at("conspiracy").get<bool>();
  v.matched_terms.clear();
  for (const auto& m : j.at("matched_terms")) {
    v.matched_terms.push_back({m.at("lexicon_id").get<std::string>(), m.at("term").get<std::string>()});
  }
}

void to_json(Json& j, const Query& v) {
  j = {{"text", v.text},
       {"tokens", v.tokens},
       {"truncated", v.truncated},
       {"original_token_count", v.original_token_count},
       {"truncated_token_count", v.truncated_token_count},
       {"char_count", v.char_count},
       {"operators", v.operators},
       {"has_operator", v.operators.has_any()},
       {"topics", v.topics}};
}

void from_json(const Json& j, Query& v) {
  v.text = j.at("text").get<std::string>();
  v.tokens = j.at("tokens").get<std::vector<std::string>>();
  v.truncated = j.at("truncated").get<bool>();
  v.original_token_count = j.at("original_token_count").get<int>();
  v.truncated_token_count = j.at("truncated_token_count").get<int>();
  v.char_count = j.at("char_count").get<int>();
  v.operators = j.at("operators").get<OperatorSet>();
  v.topics = j.at("topics").get<TopicTags>();
}

void to_json(Json& j, const SearchDirective& v) {
  j = {{"source_url", v.source_url},
       {"engine", std::string(EngineName(v.engine))},
       {"raw_query", v.raw_query},
       {"posted_at", Opt(v.posted_at)}};
}

void to_json(Json& j, const Cadence& v) {
  if (v.kind == Cadence::Kind::kSinglePass) {
    j = {{"kind", "single_pass"}};
  } else {
    j = {{"kind", "repeated"}, {"interval_seconds", v.interval_seconds}, {"steps", v.steps}};
  }
}

void from_json(const Json& j, Cadence& v) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "single_pass") {
    v = Cadence::SinglePass();
  } else if (kind == "repeated") {
    v = Cadence::Repeated(j.at("interval_seconds").get<std::int64_t>(), j.at("steps").get<int>());
  } else {
    throw Error(ErrorCode::kInvalidCadence, "unknown cadence kind '" + kind + "'");
  }
}

void to_json(Json& j, const CrawlPlan& v) {
  Json queries = Json::array();
  for (const Query& q : v.queries) queries.push_back(q.text);
  j = {{"wave_id", v.wave_id},
       {"queries", queries},
       {"cadence", v.cadence},
       {"results_per_query", v.results_per_query},
       {"politeness_delay_ms", v.politeness_delay_ms},
       {"location_label", v.location_label},
       {"engine", std::string(EngineName(v.engine))},
       {"task_count", v.task_count()}};
}

void from_json(const Json& j, CrawlPlan& v) {
  v.wave_id = j.at("wave_id").get<std::string>();
  v.queries.clear();
  for (const auto& q : j.at("queries")) v.queries.push_back(NormalizeQuery(q.get<std::string>()));
  v.cadence = j.at("cadence").get<Cadence>();
  v.results_per_query = j.value("results_per_query", 10);
  v.politeness_delay_ms = j.value("politeness_delay_ms", 1000);
  v.location_label = j.value("location_label", std::string());
  const std::string engine = j.value("engine", std::string("google"));
  auto e = EngineFromName(engine);
  if (!e) throw Error(ErrorCode::kConfig, "unknown engine '" + engine + "'");
  v.engine = *e;
}

void to_json(Json& j, const CrawlRecord& v) {
  j = {{"wave_id", v.wave_id},
       {"step_index", v.step_index},
       {"query_text", v.query_text},
       {"fetched_at", v.fetched_at},
       {"http_status", v.http_status},
       {"raw_html_ref", v.gap ? Json(nullptr) : Json(v.raw_html_ref)},
       {"gap", v.gap},
       {"attempts", v.attempts}};
}

void from_json(const Json& j, CrawlRecord& v) {
  v.wave_id = j.at("wave_id").get<std::string>();
  v.step_index = j.at("step_index").get<int>();
  v.query_text = j.at("query_text").get<std::string>();
  v.fetched_at = j.at("fetched_at").get<std::string>();
  v.http_status = j.at("http_status").get<int>();
  v.raw_html_ref = GetOpt<std::string>(j, "raw_html_ref").value_or("");
  v.gap = j.at("gap").get<bool>();
  v.attempts = j.value("attempts", 0);
}

void to_json(Json& j, const SearchResult& v) {
  j = {{"rank", v.rank},
       {"url", v.url},
       {"title", v.title},
       {"result_type", std::string(ResultTypeName(v.result_type))},
       {"domain", v.domain}};
}

void from_json(const Json& j, SearchResult& v) {
  v.rank = j.at("rank").get<int>();
  v.url = j.at("url").get<std::string>();
  v.title = j.at("title").get<std::string>();
  const std::string type = j.at("result_type").get<std::string>();
  auto t = ResultTypeFromName(type);
  if (!t) throw Error(ErrorCode::kParse, "unknown result_type '" + type + "'");
  v.result_type = *t;
  v.domain = j.at("domain").get<std::string>();
}

void to_json(Json& j, const SerpRecord& v) {
  j = {{"query_text", v.query_text},
       {"fetched_at", v.fetched_at},
       {"wave_id", v.wave_id},
       {"step_index", v.step_index},
       {"results", v.results},
       {"banner",
        {{"banner_type", std::string(BannerTypeName(v.banner.banner_type))},
         {"banner_text", v.banner.banner_text}}},
       {"estimated_total_results", Opt(v.estimated_total_results)},
       {"truncation_notice", v.truncation_notice}};
}

void from_json(const Json& j, SerpRecord& v) {
  v.query_text = j.at("query_text").get<std::string>();
  v.fetched_at = j.at("fetched_at").get<std::string>();
  v.wave_id = j.at("wave_id").get<std::string>();
  v.step_index = j.at("step_index").get<int>();
  v.results = j.at("results").get<std::vector<SearchResult>>();
  const Json& b = j.at("banner");
  const std::string type = b.at("banner_type").get<std::string>();
  auto t = BannerTypeFromName(type);
  if (!t) throw Error(ErrorCode::kParse, "unknown banner_type '" + type + "'");
  v.banner.banner_type = *t;
  v.banner.banner_text = b.at("banner_text").get<std::string>();
  v.estimated_total_results = GetOpt<std::int64_t>(j, "estimated_total_results");
  v.truncation_notice = j.at("truncation_notice").get<bool>();
}

void to_json(Json& j, const SerpAggregate& v) {
  j = {{"avg_domain_quality", Opt(v.avg_domain_quality)},
       {"rank_weighted_partisanship", Opt(v.rank_weighted_partisanship)},
       {"news_domain_count", v.news_domain_count},
       {"unique_domain_count", v.unique_domain_count},
       {"unreliable_domain_count", v.unreliable_domain_count},
       {"avg_domain_traffic_log10", Opt(v.avg_domain_traffic_log10)},
       {"estimated_total_results_log10", Opt(v.estimated_total_results_log10)},
       {"result_count", v.result_count}};
}

void from_json(const Json& j, SerpAggregate& v) {
  v.avg_domain_quality = GetOpt<double>(j, "avg_domain_quality");
  v.rank_weighted_partisanship = GetOpt<double>(j, "rank_weighted_partisanship");
  v.news_domain_count = j.at("news_domain_count").get<int>();
  v.unique_domain_count = j.at("unique_domain_count").get<int>();
  v.unreliable_domain_count = j.at("unreliable_domain_count").get<int>();
  v.avg_domain_traffic_log10 = GetOpt<double>(j, "avg_domain_traffic_log10");
  v.estimated_total_results_log10 = GetOpt<double>(j, "estimated_total_results_log10");
  v.result_count = j.value("result_count", 0);
}

void to_json(Json& j, const StabilityReport& v) {
  Json per_query = Json::object();
  for (const auto& [q, series] : v.per_query) per_query[q] = Series(series);
  Json by_group = Json::object();
  for (const auto& [g, series] : v.rbo_k_by_group) by_group[g] = Series(series);
  j = {{"n", v.n},
       {"window_max", v.window_max},
       {"per_query", per_query},
       {"rbo_k", Series(v.rbo_k)},
       {"groups", v.groups},
       {"rbo_k_by_group", by_group},
       {"normalization", v.normalization}};
}

void to_json(Json& j, const ChurnReport& v) {
  j = {{"per_query", v.per_query},
       {"mean", v.mean},
       {"sd", v.sd},
       {"skipped_empty", v.skipped_empty}};
}

void to_json(Json& j, const RankCutoffCondition& v) {
  auto pos = [](CutoffPosition p) {
    return p == CutoffPosition::kAboveCutoff ? "above_cutoff" : "at_or_below_cutoff";
  };
  j = {{"cutoff", v.cutoff},
       {"url_a", v.url_a},
       {"position_a", pos(v.position_a)},
       {"url_b", v.url_b},
       {"position_b", pos(v.position_b)}};
}

void to_json(Json& j, const Tally& v) {
  j = {{"banner_count", v.banner_count}, {"no_banner_count", v.no_banner_count}};
}

void to_json(Json& j, const LogitModel& v) {
  Json ci = nullptr;
  if (v.conf_int) {
    ci = Json::array();
    for (const auto& [lo, hi] : *v.conf_int) ci.push_back({lo, hi});
  }
  j = {{"feature_names", v.feature_names},
       {"intercept", v.intercept},
       {"coefficients", v.coefficients},
       {"alpha", v.alpha},
       {"standardized", v.standardized},
       {"converged", v.converged},
       {"iterations", v.iterations},
       {"pseudo_r2", Opt(v.pseudo_r2)},
       {"log_likelihood", v.log_likelihood},
       {"null_log_likelihood", v.null_log_likelihood},
       {"n", v.n},
       {"conf_int", ci}};
}

void from_json(const Json& j, LogitModel& v) {
  v.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  v.intercept = j.at("intercept").get<double>();
  v.coefficients = j.at("coefficients").get<std::vector<double>>();
  v.alpha = j.at("alpha").get<double>();
  v.standardized = j.value("standardized", false);
  v.converged = j.at("converged").get<bool>();
  v.iterations = j.value("iterations", 0);
  v.pseudo_r2 = GetOpt<double>(j, "pseudo_r2");
  v.log_likelihood = j.value("log_likelihood", 0.0);
  v.null_log_likelihood = j.value("null_log_likelihood", 0.0);
  v.n = j.value("n", std::size_t{0});
  v.conf_int.reset();
  if (j.contains("conf_int") && !j.at("conf_int").is_null()) {
    std::vector<std::pair<double, double>> ci;
    for (const auto& p : j.at("conf_int")) ci.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    v.conf_int = std::move(ci);
  }
}

void to_json(Json& j, const VoidLabel& v) {
  j = {{"query_id", v.query_id},
       {"wave_id", v.wave_id},
       {"step_index", v.step_index},
       {"banner_type", std::string(BannerTypeName(v.banner_type))},
       {"by_banner", v.by_banner},
       {"by_quality", Opt(v.by_quality)},
       {"by_model", Opt(v.by_model)},
       {"model_confidence", Opt(v.model_confidence)}};
}

void to_json(Json& j, const DefinitionStats& v) {
  j = {{"labeled", v.labeled},
       {"voids", v.voids},
       {"bannered", v.bannered},
       {"bannered_voids", v.bannered_voids},
       {"void_rate", v.void_rate},
       {"voids_bannered", Opt(v.voids_bannered)},
       {"bannered_are_voids", Opt(v.bannered_are_voids)}};
}

void to_json(Json& j, const WaveStats& v) {
  Json counts = Json::object();
  Json rates = Json::object();
  for (const auto& [type, c] : v.banner_counts) {
    counts[std::string(BannerTypeName(type))] = c;
    rates[std::string(BannerTypeName(type))] = v.Rate(c);
  }
  j = {{"wave_id", v.wave_id},
       {"total", v.total},
       {"banner_counts", counts},
       {"banner_rates", rates},
       {"any_banner", v.any_banner},
       {"any_banner_rate", v.Rate(v.any_banner)},
       {"low_relevance_all", v.low_relevance_all},
       {"low_relevance_all_rate", v.Rate(v.low_relevance_all)},
       {"definitions", v.definitions}};
}

void to_json(Json& j, const PrevalenceReport& v) {
  Json ex = nullptr;
  if (v.extrapolation) {
    const auto& e = *v.extrapolation;
    ex = {{"daily_searches", e.inputs.daily_searches},
          {"void_rate", e.inputs.void_rate},
          {"banner_rate", e.inputs.banner_rate},
          {"daily_voids", e.daily_voids},
          {"bannered_daily_voids", e.bannered_daily_voids}};
  }
  j = {{"waves", v.waves}, {"extrapolation", ex}};
}

std::string DumpLine(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::string DumpPretty(const Json& j) {
  return j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

std::vector<Json> ParseNdjson(std::string_view content) {
  std::vector<Json> out;
  std::size_t line_no = 0;
  for (std::string_view line : text::Split(content, '\n')) {
    ++line_no;
    if (text::TrimAscii(line).empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Json> ReadNdjson(const std::filesystem::path& path) {
  try {
    return ParseNdjson(ReadTextFile(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParse) throw;
    throw Error(ErrorCode::kParse, path.string() + " " + e.what());
  }
}

}  // namespace voidscope
