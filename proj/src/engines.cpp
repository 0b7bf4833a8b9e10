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

#include <fstream>
#include <sstream>

#include "voidscope/error.hpp"
#include "voidscope/ingest.hpp"
#include "voidscope/text.hpp"

namespace voidscope {

namespace {

constexpr std::array<std::string_view, kEngineCount> kEngineNames = {
    "google",     "bing",        "duckduckgo", "yahoo",     "brave",
    "aol",        "ask",         "baidu",      "dogpile",   "ecosia",
    "exalead",    "excite",      "hotbot",     "lycos",     "metacrawler",
    "mojeek",     "petalsearch", "qwant",      "sogou",     "startpage",
    "swisscows",  "webcrawler",  "yandex",     "you",       "youdao",
};

// Generated from data/engines.conf at configure time.
constexpr std::string_view kDefaultRules =
#include "engines_default.inc"
    ;

int CountLabels(std::string_view s) {
  if (s.empty()) return 0;
  int n = 1;
  for (char c : s) n += c == '.';
  return n;
}

}  // namespace

std::string_view EngineName(Engine engine) {
  return kEngineNames[static_cast<int>(engine)];
}

std::optional<Engine> EngineFromName(std::string_view name) {
  for (int i = 0; i < kEngineCount; ++i) {
    if (kEngineNames[i] == name) return static_cast<Engine>(i);
  }
  return std::nullopt;
}

bool EngineRule::Matches(const Url& url) const {
  const std::string& host = url.host;
  bool host_ok = false;
  if (!host_fragment.empty() && host_fragment.back() == '.') {
    // "google." matches google.<suffix> and *.google.<suffix>, where the
    // suffix is at most two labels.
    std::size_t at = std::string::npos;
    if (text::StartsWith(host, host_fragment)) {
      at = 0;
    } else {
      const auto dotted = "." + host_fragment;
      const auto pos = host.rfind(dotted);
      if (pos != std::string::npos) at = pos + 1;
    }
    if (at != std::string::npos) {
      const std::string_view rest =
          std::string_view(host).substr(at + host_fragment.size());
      const int labels = CountLabels(rest);
      host_ok = labels >= 1 && labels <= 2;
    }
  } else {
    host_ok = host == host_fragment ||
              text::EndsWith(host, "." + host_fragment);
  }
  if (!host_ok) return false;
  return path_prefix.empty() || path_prefix == "/" ||
         text::StartsWith(url.path, path_prefix);
}

EngineRules EngineRules::Parse(std::string_view content) {
  EngineRules out;
  int line_no = 0;
  for (const std::string& raw_line : text::Split(content, '\n')) {
    ++line_no;
    std::string_view line = raw_line;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = text::TrimAscii(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto lhs = text::SplitWhitespace(line.substr(0, eq));
    if (eq == std::string_view::npos || lhs.size() != 2) {
      throw Error(ErrorCode::kConfig,
                  "engine rules line " + std::to_string(line_no) +
                      ": expected '<engine> <fragment> = <params>'");
    }
    const auto engine = EngineFromName(lhs[0]);
    if (!engine) {
      throw Error(ErrorCode::kConfig, "engine rules line " +
                                          std::to_string(line_no) +
                                          ": unknown engine '" +
                                          std::string(lhs[0]) + "'");
    }
    EngineRule rule;
    rule.engine = *engine;
    const std::string_view fragment = lhs[1];
    const auto slash = fragment.find('/');
    rule.host_fragment = text::ToLowerAscii(fragment.substr(0, slash));
    if (slash != std::string_view::npos) {
      rule.path_prefix = std::string(fragment.substr(slash));
    }
    for (const std::string& p : text::Split(line.substr(eq + 1), ',')) {
      const auto trimmed = text::TrimAscii(p);
      if (!trimmed.empty()) rule.query_params.emplace_back(trimmed);
    }
    if (rule.query_params.empty()) {
      throw Error(ErrorCode::kConfig, "engine rules line " +
                                          std::to_string(line_no) +
                                          ": no query parameters");
    }
    out.rules_.push_back(std::move(rule));
  }
  return out;
}

EngineRules EngineRules::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

const EngineRules& EngineRules::Default() {
  static const EngineRules rules = Parse(kDefaultRules);
  return rules;
}

std::string_view EngineRules::DefaultText() { return kDefaultRules; }

const EngineRule* EngineRules::Match(const Url& url) const {
  for (const EngineRule& rule : rules_) {
    if (rule.Matches(url)) return &rule;
  }
  return nullptr;
}

std::optional<SearchDirective> ExtractDirective(std::string_view post_url,
                                                const EngineRules& rules) {
  const Url url = Url::Parse(post_url);
  const EngineRule* rule = rules.Match(url);
  if (rule == nullptr) return std::nullopt;
  const auto params = url.QueryParams();
  for (const std::string& name : rule->query_params) {
    for (const auto& [key, value] : params) {
      if (key != name) continue;
      const auto trimmed = text::TrimAscii(value);
      if (trimmed.empty()) continue;
      return SearchDirective{std::string(text::TrimAscii(post_url)),
                             rule->engine, std::string(trimmed),
                             std::nullopt};
    }
  }
  return std::nullopt;
}

}  // namespace voidscope
