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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voidscope/url.hpp"

namespace voidscope {

// ---------------------------------------------------------------------------
// Search engines and directive extraction.

enum class Engine {
  kGoogle, kBing, kDuckDuckGo, kYahoo, kBrave, kAol, kAsk, kBaidu, kDogpile,
  kEcosia, kExalead, kExcite, kHotbot, kLycos, kMetacrawler, kMojeek,
  kPetalsearch, kQwant, kSogou, kStartpage, kSwisscows, kWebcrawler, kYandex,
  kYou, kYoudao,
};
inline constexpr int kEngineCount = 25;

std::string_view EngineName(Engine engine);
std::optional<Engine> EngineFromName(std::string_view name);

struct EngineRule {
  Engine engine;
  // Host part of the fragment, e.g. "google." or "search.brave.com". A
  // trailing dot matches any public suffix.
  std::string host_fragment;
  std::string path_prefix;
  std::vector<std::string> query_params;

  bool Matches(const Url& url) const;
};

// Ordered engine rules. The text format is one rule per line:
//   <engine> <host-fragment>[/path-prefix] = <param>[,<param>...]
// with '#' comments.
class EngineRules {
 public:
  static EngineRules Parse(std::string_view text);
  static EngineRules LoadFile(const std::filesystem::path& path);
  static const EngineRules& Default();
  static std::string_view DefaultText();

  const std::vector<EngineRule>& rules() const { return rules_; }
  const EngineRule* Match(const Url& url) const;

 private:
  std::vector<EngineRule> rules_;
};

struct SearchDirective {
  std::string source_url;
  Engine engine;
  std::string raw_query;
  std::optional<std::string> posted_at;
};

// Returns nothing for unknown engines, homepage links and blank queries.
// Throws Error(kMalformedUrl) when post_url cannot be parsed.
std::optional<SearchDirective> ExtractDirective(std::string_view post_url,
                                                const EngineRules& rules);

// ---------------------------------------------------------------------------
// Query normalization and features.

inline constexpr int kMaxQueryTokens = 32;

enum class Operator {
  kSite, kInurl, kFiletype, kIntitle, kExt, kBefore, kSource, kRelated,
  kAllintitle, kAfter, kAllinurl,
};
inline constexpr int kOperatorCount = 11;

std::string_view OperatorName(Operator op);

struct OperatorSet {
  std::array<int, kOperatorCount> counts{};

  int count(Operator op) const { return counts[static_cast<int>(op)]; }
  int total() const;
  bool has_any() const { return total() > 0; }
};

enum class LexiconFamily { kPolitical, kConspiracy };

struct LexiconMatch {
  std::string lexicon_id;
  std::string term;

  friend bool operator==(const LexiconMatch&, const LexiconMatch&) = default;
};

struct TopicTags {
  bool political = false;
  bool conspiracy = false;
  std::vector<LexiconMatch> matched_terms;
};

struct Query {
  // Display text after truncation; empty when no tokens survive.
  std::string text;
  std::vector<std::string> tokens;
  bool truncated = false;
  int original_token_count = 0;
  int truncated_token_count = 0;
  int char_count = 0;
  OperatorSet operators;
  TopicTags topics;
};

// Splits on whitespace, strips leading/trailing punctuation and symbols from
// each piece and drops pieces that become empty. Keeps at most 32 tokens.
Query NormalizeQuery(std::string_view raw);

// The same token rule used by NormalizeQuery, exposed for lexicon terms.
std::vector<std::string> TokenizeLower(std::string_view text);

// Case-insensitive. An operator counts when "op:" starts the text or follows
// whitespace, a quote, a parenthesis, a bracket or '|'.
OperatorSet DetectOperators(const Query& query);
OperatorSet DetectOperators(std::string_view text);

// ---------------------------------------------------------------------------
// Lexicons.

struct Lexicon {
  std::string id;
  LexiconFamily family = LexiconFamily::kConspiracy;
  std::optional<std::string> category;
  // Lower-cased, deduplicated. Hashtag terms appear both with the hash and in
  // their de-hashtagged spaced form.
  std::vector<std::string> terms;
  std::vector<std::string> excluded;
};

// CSV columns: lexicon_id,family,category,term,spaced_form,excluded
std::vector<Lexicon> ParseLexiconCsv(std::string_view csv);
std::vector<Lexicon> LoadLexiconCsv(const std::filesystem::path& path);

// Throws Error(kEmptyLexicon) if lexicons is empty or any lexicon has no
// terms.
TopicTags TagLexicons(const Query& query, std::span<const Lexicon> lexicons);

// ---------------------------------------------------------------------------
// Perturbations.

struct PerturbationSpec {
  bool pluralize = false;
  std::optional<double> typo_probability;
  bool quote_toggle = false;
};

// One normalized variant per requested kind, in the order pluralize, typo,
// quote_toggle. Deterministic for a given seed.
std::vector<Query> GeneratePerturbations(const Query& query,
                                         const PerturbationSpec& spec,
                                         std::uint64_t seed);

std::string PluralizeWord(std::string_view word);
std::string PluralizeQuery(std::string_view text);
std::string ToggleQuotes(std::string_view text);
std::string InjectTypos(std::string_view text, double probability,
                        std::uint64_t seed);

}  // namespace voidscope
