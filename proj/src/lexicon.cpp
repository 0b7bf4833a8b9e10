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

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "voidscope/error.hpp"
#include "voidscope/ingest.hpp"
#include "voidscope/text.hpp"

namespace voidscope {

namespace {

void AddUnique(std::vector<std::string>& list, std::string value) {
  if (value.empty()) return;
  if (std::find(list.begin(), list.end(), value) == list.end()) {
    list.push_back(std::move(value));
  }
}

bool ParseBool(std::string_view s, int line_no) {
  const std::string v = text::ToLowerAscii(text::TrimAscii(s));
  if (v.empty() || v == "false" || v == "0" || v == "no") return false;
  if (v == "true" || v == "1" || v == "yes") return true;
  throw Error(ErrorCode::kParse, "lexicon row " + std::to_string(line_no) +
                                     ": bad excluded flag '" + v + "'");
}

bool ContainsRun(const std::vector<std::string>& haystack,
                 const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

}  // namespace

std::vector<Lexicon> ParseLexiconCsv(std::string_view csv) {
  const auto rows = text::ParseCsv(csv);
  if (rows.empty()) throw Error(ErrorCode::kEmptyLexicon, "lexicon file is empty");
  const std::vector<std::string> expected = {"lexicon_id", "family", "category",
                                             "term", "spaced_form", "excluded"};
  std::vector<std::string> header;
  for (const auto& h : rows[0]) header.push_back(text::ToLowerAscii(text::TrimAscii(h)));
  if (header != expected) {
    throw Error(ErrorCode::kParse,
                "lexicon header must be lexicon_id,family,category,term,"
                "spaced_form,excluded");
  }

  std::vector<Lexicon> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::map<std::string, LexiconFamily> families;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const int line_no = static_cast<int>(r) + 1;
    if (row.size() != 6) {
      throw Error(ErrorCode::kParse, "lexicon row " + std::to_string(line_no) +
                                         ": expected 6 columns");
    }
    const std::string id(text::TrimAscii(row[0]));
    const std::string family_name = text::ToLowerAscii(text::TrimAscii(row[1]));
    LexiconFamily family;
    if (family_name == "political") {
      family = LexiconFamily::kPolitical;
    } else if (family_name == "conspiracy") {
      family = LexiconFamily::kConspiracy;
    } else {
      throw Error(ErrorCode::kParse, "lexicon row " + std::to_string(line_no) +
                                         ": unknown family '" + family_name + "'");
    }
    if (auto it = families.find(id); it != families.end() && it->second != family) {
      throw Error(ErrorCode::kParse, "lexicon '" + id + "' mixes families");
    }
    families[id] = family;

    const std::string category(text::TrimAscii(row[2]));
    auto key = std::make_pair(id, category);
    auto it = index.find(key);
    if (it == index.end()) {
      Lexicon lex;
      lex.id = id;
      lex.family = family;
      if (!category.empty()) lex.category = category;
      out.push_back(std::move(lex));
      it = index.emplace(key, out.size() - 1).first;
    }
    Lexicon& lex = out[it->second];

    const std::string term = text::ToLowerAscii(text::TrimAscii(row[3]));
    const std::string spaced = text::ToLowerAscii(text::TrimAscii(row[4]));
    auto& target = ParseBool(row[5], line_no) ? lex.excluded : lex.terms;
    AddUnique(target, term);
    if (text::StartsWith(term, "#")) AddUnique(target, term.substr(1));
    AddUnique(target, spaced);
  }
  return out;
}

std::vector<Lexicon> LoadLexiconCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseLexiconCsv(buf.str());
}

TopicTags TagLexicons(const Query& query, std::span<const Lexicon> lexicons) {
  if (lexicons.empty()) {
    throw Error(ErrorCode::kEmptyLexicon, "no lexicons configured");
  }
  std::vector<std::string> tokens;
  tokens.reserve(query.tokens.size());
  for (const auto& t : query.tokens) tokens.push_back(text::ToLowerAscii(t));

  TopicTags tags;
  for (const Lexicon& lex : lexicons) {
    if (lex.terms.empty()) {
      throw Error(ErrorCode::kEmptyLexicon, "lexicon '" + lex.id + "' has no terms");
    }
    std::set<std::vector<std::string>> excluded;
    for (const auto& e : lex.excluded) excluded.insert(TokenizeLower(e));

    std::set<std::vector<std::string>> seen;
    for (const std::string& term : lex.terms) {
      auto term_tokens = TokenizeLower(term);
      if (term_tokens.empty() || excluded.contains(term_tokens)) continue;
      if (!ContainsRun(tokens, term_tokens)) continue;
      if (!seen.insert(term_tokens).second) continue;
      tags.matched_terms.push_back({lex.id, term});
      if (lex.family == LexiconFamily::kPolitical) tags.political = true;
      if (lex.family == LexiconFamily::kConspiracy) tags.conspiracy = true;
    }
  }
  return tags;
}

}  // namespace voidscope
