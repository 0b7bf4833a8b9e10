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

#include "voidscope/ingest.hpp"

#include <algorithm>

#include "voidscope/text.hpp"

namespace voidscope {

namespace {

constexpr std::array<std::string_view, kOperatorCount> kOperatorNames = {
    "site",   "inurl",  "filetype", "intitle",    "ext",      "before",
    "source", "related", "allintitle", "after", "allinurl",
};

struct Piece {
  std::string_view raw;    // whitespace-delimited span of the display text
  std::string_view token;  // raw with punctuation stripped from both ends
};

// Strips non-word code points from both ends of a piece.
std::string_view StripPiece(std::string_view piece) {
  std::size_t begin = 0;
  while (begin < piece.size()) {
    std::size_t next = begin;
    if (text::IsWordCodePoint(text::NextCodePoint(piece, next))) break;
    begin = next;
  }
  std::size_t end = begin;
  std::size_t pos = begin;
  while (pos < piece.size()) {
    const char32_t cp = text::NextCodePoint(piece, pos);
    if (text::IsWordCodePoint(cp)) end = pos;
  }
  return piece.substr(begin, end - begin);
}

std::vector<Piece> Pieces(std::string_view display) {
  std::vector<Piece> out;
  for (std::string_view raw : text::SplitWhitespace(display)) {
    const std::string_view token = StripPiece(raw);
    if (!token.empty()) out.push_back({raw, token});
  }
  return out;
}

bool IsOperatorBoundary(char c) {
  return c == ' ' || c == '\t' || c == '"' || c == '\'' || c == '(' ||
         c == ')' || c == '[' || c == '{' || c == '|';
}

}  // namespace

std::string_view OperatorName(Operator op) {
  return kOperatorNames[static_cast<int>(op)];
}

int OperatorSet::total() const {
  int sum = 0;
  for (int c : counts) sum += c;
  return sum;
}

Query NormalizeQuery(std::string_view raw) {
  const std::string display = text::CollapseWhitespace(raw);
  const std::vector<Piece> pieces = Pieces(display);

  Query q;
  q.original_token_count = static_cast<int>(pieces.size());
  q.truncated = q.original_token_count > kMaxQueryTokens;
  const std::size_t kept =
      std::min<std::size_t>(pieces.size(), kMaxQueryTokens);
  for (std::size_t i = 0; i < kept; ++i) q.tokens.emplace_back(pieces[i].token);
  q.truncated_token_count = static_cast<int>(kept);

  if (kept == 0) {
    q.text.clear();
  } else if (q.truncated) {
    const std::string_view last = pieces[kept - 1].raw;
    const std::size_t end =
        static_cast<std::size_t>(last.data() - display.data()) + last.size();
    q.text = display.substr(0, end);
  } else {
    q.text = display;
  }
  q.char_count = static_cast<int>(text::CodePointCount(q.text));
  q.operators = DetectOperators(q.text);
  return q;
}

std::vector<std::string> TokenizeLower(std::string_view input) {
  const std::string display = text::CollapseWhitespace(input);
  std::vector<std::string> out;
  for (const Piece& p : Pieces(display)) {
    out.push_back(text::ToLowerAscii(p.token));
  }
  return out;
}

OperatorSet DetectOperators(std::string_view input) {
  const std::string lower = text::ToLowerAscii(input);
  OperatorSet set;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (i > 0 && !IsOperatorBoundary(lower[i - 1])) continue;
    for (int op = 0; op < kOperatorCount; ++op) {
      const std::string_view name = kOperatorNames[op];
      if (lower.compare(i, name.size(), name) == 0 &&
          i + name.size() < lower.size() && lower[i + name.size()] == ':') {
        ++set.counts[op];
        break;
      }
    }
  }
  return set;
}

OperatorSet DetectOperators(const Query& query) {
  return DetectOperators(query.text);
}

}  // namespace voidscope
