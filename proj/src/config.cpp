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

#include "voidscope/config.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "voidscope/error.hpp"
#include "voidscope/hash.hpp"
#include "voidscope/io.hpp"
#include "voidscope/text.hpp"

namespace voidscope {

namespace {

[[noreturn]] void Bad(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(ErrorCode::kConfig, std::string(key) + " = '" + std::string(value) +
                                      "': expected " + std::string(want));
}

long long ToInt(std::string_view key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size()) Bad(key, v, "an integer");
  return out;
}

double ToDouble(std::string_view key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size()) Bad(key, v, "a number");
  return out;
}

bool ToBool(std::string_view key, const std::string& v) {
  const std::string l = text::ToLowerAscii(v);
  if (l == "true" || l == "yes" || l == "1") return true;
  if (l == "false" || l == "no" || l == "0") return false;
  Bad(key, v, "true or false");
}

std::vector<int> ToIntList(std::string_view key, const std::string& v) {
  std::vector<int> out;
  for (const auto& part : text::Split(v, ',')) {
    out.push_back(static_cast<int>(ToInt(key, std::string(text::TrimAscii(part)))));
  }
  return out;
}

std::string FormatDouble(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

std::string BandLabel(const std::vector<int>& edges, int count) {
  for (std::size_t i = edges.size(); i-- > 0;) {
    if (count < edges[i]) continue;
    if (i + 1 == edges.size()) return std::to_string(edges[i]) + "+";
    if (edges[i + 1] - 1 == edges[i]) return std::to_string(edges[i]);
    return std::to_string(edges[i]) + "-" + std::to_string(edges[i + 1] - 1);
  }
  return "<" + std::to_string(edges.empty() ? 0 : edges.front());
}

PipelineConfig ParseConfig(std::string_view content, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  auto path = [&](std::filesystem::path& field) {
    return [&field, &base_dir](std::string_view, const std::string& v) {
      if (v.empty()) {
        field.clear();
        return;
      }
      std::filesystem::path p(v);
      field = p.is_absolute() ? p : (base_dir / p).lexically_normal();
    };
  };
  using Setter = std::function<void(std::string_view, const std::string&)>;
  int interval = 0;
  int steps = 1;
  std::string cadence_kind = "single_pass";
  ExtrapolationInputs ex;
  int ex_fields = 0;

  const std::map<std::string, Setter> setters = {
      {"work_dir", path(c.work_dir)},
      {"seed", [&](auto k, auto& v) { c.seed = static_cast<std::uint64_t>(ToInt(k, v)); }},
      {"ingest.directives", path(c.directives)},
      {"ingest.lexicons", path(c.lexicons)},
      {"ingest.engine_rules", path(c.engine_rules)},
      {"ingest.perturb.pluralize", [&](auto k, auto& v) { c.perturb.pluralize = ToBool(k, v); }},
      {"ingest.perturb.quote_toggle",
       [&](auto k, auto& v) { c.perturb.quote_toggle = ToBool(k, v); }},
      {"ingest.perturb.typo_probability",
       [&](auto k, auto& v) {
         if (v.empty()) {
           c.perturb.typo_probability.reset();
         } else {
           c.perturb.typo_probability = ToDouble(k, v);
         }
       }},
      {"tables.quality", path(c.quality)},
      {"tables.partisanship", path(c.partisanship)},
      {"tables.seo", path(c.seo)},
      {"tables.news", path(c.news)},
      {"tables.psl", path(c.psl)},
      {"crawl.wave_id", [&](auto, auto& v) { c.wave_id = v; }},
      {"crawl.cadence", [&](auto, auto& v) { cadence_kind = v; }},
      {"crawl.interval_seconds", [&](auto k, auto& v) { interval = static_cast<int>(ToInt(k, v)); }},
      {"crawl.steps", [&](auto k, auto& v) { steps = static_cast<int>(ToInt(k, v)); }},
      {"crawl.results_per_query",
       [&](auto k, auto& v) { c.results_per_query = static_cast<int>(ToInt(k, v)); }},
      {"crawl.delay_ms", [&](auto k, auto& v) { c.delay_ms = static_cast<int>(ToInt(k, v)); }},
      {"crawl.location_label", [&](auto, auto& v) { c.location_label = v; }},
      {"crawl.engine",
       [&](auto k, auto& v) {
         auto e = EngineFromName(v);
         if (!e) Bad(k, v, "an engine name");
         c.engine = *e;
       }},
      {"crawl.fetcher",
       [&](auto k, auto& v) {
         if (v != "replay" && v != "http") Bad(k, v, "replay or http");
         c.fetcher = v;
       }},
      {"crawl.replay_dir", path(c.replay_dir)},
      {"crawl.start", [&](auto, auto& v) { c.crawl_start = v; }},
      {"crawl.max_attempts",
       [&](auto k, auto& v) { c.max_attempts = static_cast<int>(ToInt(k, v)); }},
      {"crawl.backoff_ms", [&](auto k, auto& v) { c.backoff_ms = static_cast<int>(ToInt(k, v)); }},
      {"aggregate.quality_mean",
       [&](auto k, auto& v) {
         if (v == "instance") {
           c.quality_mean = QualityMean::kInstance;
         } else if (v == "unique_domain") {
           c.quality_mean = QualityMean::kUniqueDomain;
         } else {
           Bad(k, v, "instance or unique_domain");
         }
       }},
      {"stability.window_max",
       [&](auto k, auto& v) { c.window_max = static_cast<int>(ToInt(k, v)); }},
      {"stability.depth", [&](auto k, auto& v) { c.rbo_depth = static_cast<int>(ToInt(k, v)); }},
      {"stability.bands", [&](auto k, auto& v) { c.band_edges = ToIntList(k, v); }},
      {"explain.cutoff_min",
       [&](auto k, auto& v) { c.cutoff_min = static_cast<int>(ToInt(k, v)); }},
      {"explain.cutoff_max",
       [&](auto k, auto& v) { c.cutoff_max = static_cast<int>(ToInt(k, v)); }},
      {"explain.max_order", [&](auto k, auto& v) { c.max_order = static_cast<int>(ToInt(k, v)); }},
      {"explain.pair_mode",
       [&](auto k, auto& v) {
         if (v == "joint") {
           c.pair_mode = PairMode::kJoint;
         } else if (v == "independent") {
           c.pair_mode = PairMode::kIndependent;
         } else {
           Bad(k, v, "joint or independent");
         }
       }},
      {"explain.banner",
       [&](auto k, auto& v) {
         if (v == "low_quality") {
           c.explain_banner = ExplainBanner::kLowQuality;
         } else if (v == "any") {
           c.explain_banner = ExplainBanner::kAny;
         } else {
           Bad(k, v, "low_quality or any");
         }
       }},
      {"logit.targets",
       [&](auto k, auto& v) {
         c.logit_targets.clear();
         for (const auto& part : text::Split(v, ',')) {
           auto t = LogitTargetFromName(text::TrimAscii(part));
           if (!t) Bad(k, v, "low_quality and/or low_relevance");
           c.logit_targets.push_back(*t);
         }
       }},
      {"logit.alpha", [&](auto k, auto& v) { c.alpha = ToDouble(k, v); }},
      {"logit.standardize", [&](auto k, auto& v) { c.standardize = ToBool(k, v); }},
      {"logit.rows",
       [&](auto k, auto& v) {
         if (v == "first_step") {
           c.logit_rows = LogitRows::kFirstStep;
         } else if (v == "all_steps") {
           c.logit_rows = LogitRows::kAllSteps;
         } else {
           Bad(k, v, "first_step or all_steps");
         }
       }},
      {"report.quality_threshold", [&](auto k, auto& v) { c.quality_threshold = ToDouble(k, v); }},
      {"report.comparator",
       [&](auto k, auto& v) {
         if (v == "le") {
           c.comparator = Comparator::kLessOrEqual;
         } else if (v == "lt") {
           c.comparator = Comparator::kLess;
         } else {
           Bad(k, v, "le or lt");
         }
       }},
      {"report.model_threshold", [&](auto k, auto& v) { c.model_threshold = ToDouble(k, v); }},
      {"report.model_preds", path(c.model_preds)},
      {"report.extrapolate.daily_searches",
       [&](auto k, auto& v) { ex.daily_searches = ToDouble(k, v); ++ex_fields; }},
      {"report.extrapolate.void_rate",
       [&](auto k, auto& v) { ex.void_rate = ToDouble(k, v); ++ex_fields; }},
      {"report.extrapolate.banner_rate",
       [&](auto k, auto& v) { ex.banner_rate = ToDouble(k, v); ++ex_fields; }},
  };

  std::size_t line_no = 0;
  for (const std::string& raw : text::Split(content, '\n')) {
    ++line_no;
    const std::string_view line = text::TrimAscii(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(text::TrimAscii(line.substr(0, eq)));
    const std::string value(text::TrimAscii(line.substr(eq + 1)));
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(key, value);
  }

  if (cadence_kind == "single_pass") {
    c.cadence = Cadence::SinglePass();
  } else if (cadence_kind == "repeated") {
    c.cadence = Cadence::Repeated(interval, steps);
  } else {
    Bad("crawl.cadence", cadence_kind, "single_pass or repeated");
  }
  if (ex_fields == 3) {
    c.extrapolation = ex;
  } else if (ex_fields != 0) {
    throw Error(ErrorCode::kConfig,
                "report.extrapolate needs daily_searches, void_rate and banner_rate together");
  }
  return c;
}

PipelineConfig LoadConfig(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kConfig, "config file not found: " + path.string());
  }
  return ParseConfig(ReadTextFile(path), path.parent_path());
}

void ValidateConfig(const PipelineConfig& c) {
  std::vector<std::string> problems;
  auto check_path = [&](const char* key, const std::filesystem::path& p) {
    if (!p.empty() && !std::filesystem::exists(p)) {
      problems.push_back(std::string(key) + ": no such file " + p.string());
    }
  };
  check_path("ingest.directives", c.directives);
  check_path("ingest.lexicons", c.lexicons);
  check_path("ingest.engine_rules", c.engine_rules);
  check_path("tables.quality", c.quality);
  check_path("tables.partisanship", c.partisanship);
  check_path("tables.seo", c.seo);
  check_path("tables.news", c.news);
  check_path("tables.psl", c.psl);
  check_path("report.model_preds", c.model_preds);
  check_path("crawl.replay_dir", c.replay_dir);
  if (c.fetcher == "replay" && c.replay_dir.empty()) {
    problems.push_back("crawl.replay_dir is required when crawl.fetcher = replay");
  }
  if (c.cadence.kind == Cadence::Kind::kRepeated &&
      (c.cadence.steps < 1 || c.cadence.interval_seconds <= 0)) {
    problems.push_back("crawl: repeated cadence needs steps >= 1 and interval_seconds > 0");
  }
  if (c.results_per_query < 1 || c.results_per_query > 100) {
    problems.push_back("crawl.results_per_query must be in 1..100");
  }
  if (c.delay_ms < 0) problems.push_back("crawl.delay_ms must be >= 0");
  if (c.max_attempts < 1) problems.push_back("crawl.max_attempts must be >= 1");
  if (c.window_max < 1) problems.push_back("stability.window_max must be >= 1");
  if (c.rbo_depth < 0) problems.push_back("stability.depth must be >= 0");
  if (c.band_edges.empty() || !std::is_sorted(c.band_edges.begin(), c.band_edges.end()) ||
      std::adjacent_find(c.band_edges.begin(), c.band_edges.end()) != c.band_edges.end()) {
    problems.push_back("stability.bands must be strictly increasing");
  }
  if (c.cutoff_min < 1 || c.cutoff_max < c.cutoff_min) {
    problems.push_back("explain cutoffs need 1 <= cutoff_min <= cutoff_max");
  }
  if (c.max_order < 1 || c.max_order > 3) problems.push_back("explain.max_order must be 1..3");
  if (!(c.alpha >= 0)) problems.push_back("logit.alpha must be >= 0");
  if (!(c.quality_threshold >= 0 && c.quality_threshold <= 1)) {
    problems.push_back("report.quality_threshold must be in [0,1]");
  }
  if (!(c.model_threshold >= 0 && c.model_threshold <= 1)) {
    problems.push_back("report.model_threshold must be in [0,1]");
  }
  if (c.perturb.typo_probability &&
      !(*c.perturb.typo_probability >= 0 && *c.perturb.typo_probability <= 1)) {
    problems.push_back("ingest.perturb.typo_probability must be in [0,1]");
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::kConfig, msg);
  }
}

std::string CanonicalAnalysisSettings(const PipelineConfig& c) {
  std::map<std::string, std::string> kv;
  kv["seed"] = std::to_string(c.seed);
  kv["ingest.perturb.pluralize"] = c.perturb.pluralize ? "true" : "false";
  kv["ingest.perturb.quote_toggle"] = c.perturb.quote_toggle ? "true" : "false";
  kv["ingest.perturb.typo_probability"] =
      c.perturb.typo_probability ? FormatDouble(*c.perturb.typo_probability) : "";
  kv["crawl.wave_id"] = c.wave_id;
  kv["crawl.cadence"] = c.cadence.kind == Cadence::Kind::kSinglePass ? "single_pass" : "repeated";
  kv["crawl.interval_seconds"] = std::to_string(c.cadence.interval_seconds);
  kv["crawl.steps"] = std::to_string(c.cadence.steps);
  kv["crawl.results_per_query"] = std::to_string(c.results_per_query);
  kv["crawl.delay_ms"] = std::to_string(c.delay_ms);
  kv["crawl.location_label"] = c.location_label;
  kv["crawl.engine"] = std::string(EngineName(c.engine));
  kv["crawl.fetcher"] = c.fetcher;
  kv["crawl.start"] = c.crawl_start;
  kv["crawl.max_attempts"] = std::to_string(c.max_attempts);
  kv["crawl.backoff_ms"] = std::to_string(c.backoff_ms);
  kv["aggregate.quality_mean"] =
      c.quality_mean == QualityMean::kInstance ? "instance" : "unique_domain";
  kv["stability.window_max"] = std::to_string(c.window_max);
  kv["stability.depth"] = std::to_string(c.rbo_depth);
  std::string bands;
  for (int e : c.band_edges) bands += (bands.empty() ? "" : ",") + std::to_string(e);
  kv["stability.bands"] = bands;
  kv["explain.cutoff_min"] = std::to_string(c.cutoff_min);
  kv["explain.cutoff_max"] = std::to_string(c.cutoff_max);
  kv["explain.max_order"] = std::to_string(c.max_order);
  kv["explain.pair_mode"] = c.pair_mode == PairMode::kJoint ? "joint" : "independent";
  kv["explain.banner"] = c.explain_banner == ExplainBanner::kLowQuality ? "low_quality" : "any";
  std::string targets;
  for (auto t : c.logit_targets) targets += (targets.empty() ? "" : ",") + std::string(LogitTargetName(t));
  kv["logit.targets"] = targets;
  kv["logit.alpha"] = FormatDouble(c.alpha);
  kv["logit.standardize"] = c.standardize ? "true" : "false";
  kv["logit.rows"] = c.logit_rows == LogitRows::kFirstStep ? "first_step" : "all_steps";
  kv["report.quality_threshold"] = FormatDouble(c.quality_threshold);
  kv["report.comparator"] = c.comparator == Comparator::kLessOrEqual ? "le" : "lt";
  kv["report.model_threshold"] = FormatDouble(c.model_threshold);
  if (c.extrapolation) {
    kv["report.extrapolate.daily_searches"] = FormatDouble(c.extrapolation->daily_searches);
    kv["report.extrapolate.void_rate"] = FormatDouble(c.extrapolation->void_rate);
    kv["report.extrapolate.banner_rate"] = FormatDouble(c.extrapolation->banner_rate);
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string ConfigHash(const PipelineConfig& config) {
  return Sha256Hex(CanonicalAnalysisSettings(config));
}

}  // namespace voidscope
