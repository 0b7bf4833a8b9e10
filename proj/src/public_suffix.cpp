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

#include "voidscope/error.hpp"
#include "voidscope/io.hpp"
#include "voidscope/serp.hpp"
#include "voidscope/text.hpp"
#include "voidscope/url.hpp"

namespace voidscope {

namespace {

constexpr std::string_view kDefaultRules =
#include "public_suffix_default.inc"
    ;

bool IsIpLiteral(std::string_view host) {
  if (host.starts_with("[")) return true;
  return !host.empty() && std::all_of(host.begin(), host.end(), [](char c) {
    return (c >= '0' && c <= '9') || c == '.';
  });
}

}  // namespace

PublicSuffixList PublicSuffixList::Parse(std::string_view text) {
  PublicSuffixList psl;
  for (std::string_view line : text::Split(text, '\n')) {
    line = text::TrimAscii(line);
    if (line.empty() || line.starts_with("//")) continue;
    // Rules end at the first whitespace.
    const auto ws = line.find_first_of(" \t");
    if (ws != std::string_view::npos) line = line.substr(0, ws);
    psl.rules_.push_back(text::ToLowerAscii(line));
  }
  std::sort(psl.rules_.begin(), psl.rules_.end());
  psl.rules_.erase(std::unique(psl.rules_.begin(), psl.rules_.end()), psl.rules_.end());
  if (psl.rules_.empty()) throw Error(ErrorCode::kConfig, "empty public suffix list");
  return psl;
}

PublicSuffixList PublicSuffixList::LoadFile(const std::filesystem::path& path) {
  return Parse(ReadTextFile(path));
}

const PublicSuffixList& PublicSuffixList::Default() {
  static const PublicSuffixList psl = Parse(kDefaultRules);
  return psl;
}

std::string PublicSuffixList::RegistrableDomain(std::string_view host) const {
  if (host.empty() || IsIpLiteral(host)) return std::string(host);
  auto has = [&](const std::string& rule) {
    return std::binary_search(rules_.begin(), rules_.end(), rule);
  };
  const std::vector<std::string> labels = text::Split(host, '.');
  const std::size_t n = labels.size();
  // Suffix length in labels; the implicit "*" rule gives 1.
  std::size_t suffix_len = 1;
  for (std::size_t len = 1; len <= n; ++len) {
    std::string candidate;
    for (std::size_t k = n - len; k < n; ++k) {
      if (!candidate.empty()) candidate += '.';
      candidate += labels[k];
    }
    if (has("!" + candidate)) {
      suffix_len = len - 1;
      break;
    }
    const auto dot = candidate.find('.');
    const bool wildcard = dot != std::string::npos && has("*" + candidate.substr(dot));
    if (has(candidate) || wildcard) suffix_len = len;
  }
  if (suffix_len >= n) return std::string(host);
  std::string out;
  for (std::size_t k = n - suffix_len - 1; k < n; ++k) {
    if (!out.empty()) out += '.';
    out += labels[k];
  }
  return out;
}

std::string ExtractDomain(std::string_view url, const PublicSuffixList& psl) {
  Url parsed;
  try {
    parsed = Url::Parse(url);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidUrl, std::string(url));
  }
  std::string host = parsed.host;
  if (host.empty()) throw Error(ErrorCode::kInvalidUrl, std::string(url));
  if (host.starts_with("www.")) host.erase(0, 4);
  return psl.RegistrableDomain(host);
}

}  // namespace voidscope
