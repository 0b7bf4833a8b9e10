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
#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 and ASCII string helpers shared by the parsers.
namespace voidscope::text {

std::string ToLowerAscii(std::string_view s);
std::string_view TrimAscii(std::string_view s);
std::vector<std::string_view> SplitWhitespace(std::string_view s);
std::vector<std::string> Split(std::string_view s, char sep);
bool StartsWith(std::string_view s, std::string_view prefix);
bool EndsWith(std::string_view s, std::string_view suffix);
bool IEquals(std::string_view a, std::string_view b);

// Decodes one code point starting at s[pos], advancing pos. Invalid bytes
// decode as U+FFFD and consume a single byte.
char32_t NextCodePoint(std::string_view s, std::size_t& pos);
std::u32string DecodeUtf8(std::string_view s);
void AppendUtf8(std::string& out, char32_t cp);
std::size_t CodePointCount(std::string_view s);

// A code point that can be part of a word: ASCII letters and digits, plus
// non-ASCII letters outside the punctuation, symbol and emoji blocks.
bool IsWordCodePoint(char32_t cp);

// Collapses runs of whitespace (including NBSP and thin spaces) to a single
// ASCII space and trims both ends.
std::string CollapseWhitespace(std::string_view s);

// RFC 4180-style CSV: quoted fields, doubled quotes, CRLF or LF rows.
// Blank lines are skipped.
std::vector<std::vector<std::string>> ParseCsv(std::string_view csv);
std::string CsvEscape(std::string_view field);

// Formats an integer with comma thousands separators.
std::string WithThousands(std::int64_t value);

}  // namespace voidscope::text
