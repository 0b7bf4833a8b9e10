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

#include "voidscope/url.hpp"

#include <cctype>

#include "voidscope/error.hpp"
#include "voidscope/text.hpp"

namespace voidscope {

namespace {

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool IsSchemeChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
         c == '.';
}

bool IsValidHostChar(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '-' || c == '.' || c == '_' || c == '[' ||
         c == ']' || c == ':' || u >= 0x80;
}

}  // namespace

Url Url::Parse(std::string_view input) {
  std::string_view s = text::TrimAscii(input);
  const auto colon = s.find("://");
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::kMalformedUrl, "missing scheme in '" +
                                              std::string(input) + "'");
  }
  for (char c : s.substr(0, colon)) {
    if (!IsSchemeChar(c)) {
      throw Error(ErrorCode::kMalformedUrl,
                  "bad scheme in '" + std::string(input) + "'");
    }
  }
  Url url;
  url.scheme = text::ToLowerAscii(s.substr(0, colon));
  std::string_view rest = s.substr(colon + 3);

  const auto hash = rest.find('#');
  if (hash != std::string_view::npos) {
    url.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  const auto qmark = rest.find('?');
  if (qmark != std::string_view::npos) {
    url.query = std::string(rest.substr(qmark + 1));
    rest = rest.substr(0, qmark);
  }
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  url.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));

  const auto at = authority.rfind('@');
  if (at != std::string_view::npos) authority = authority.substr(at + 1);
  std::string_view host = authority;
  std::size_t port_from = 0;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos || close < 2) {
      throw Error(ErrorCode::kMalformedUrl, "unterminated IPv6 host in '" + std::string(input) + "'");
    }
    for (char c : authority.substr(1, close - 1)) {
      if (!std::isxdigit(static_cast<unsigned char>(c)) && c != ':' && c != '.') {
        throw Error(ErrorCode::kMalformedUrl, "bad IPv6 host in '" + std::string(input) + "'");
      }
    }
    host = authority.substr(0, close + 1);
    port_from = close + 1;
    if (port_from < authority.size() && authority[port_from] != ':') {
      throw Error(ErrorCode::kMalformedUrl, "bad host in '" + std::string(input) + "'");
    }
  } else if (authority.find_first_of("[]") != std::string_view::npos) {
    throw Error(ErrorCode::kMalformedUrl, "bad host in '" + std::string(input) + "'");
  }
  if (port_from < authority.size()) {
    const auto port_sep = authority.find(':', port_from);
    if (port_sep != std::string_view::npos) {
      url.port = std::string(authority.substr(port_sep + 1));
      if (port_from == 0) host = authority.substr(0, port_sep);
      for (char c : url.port) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
          throw Error(ErrorCode::kMalformedUrl,
                      "bad port in '" + std::string(input) + "'");
        }
      }
    }
  }
  if (host.empty()) {
    throw Error(ErrorCode::kMalformedUrl,
                "missing host in '" + std::string(input) + "'");
  }
  for (char c : host) {
    if (!IsValidHostChar(c)) {
      throw Error(ErrorCode::kMalformedUrl,
                  "bad host in '" + std::string(input) + "'");
    }
  }
  url.host = text::ToLowerAscii(host);
  while (!url.host.empty() && url.host.back() == '.') url.host.pop_back();
  if (url.host.empty()) {
    throw Error(ErrorCode::kMalformedUrl,
                "missing host in '" + std::string(input) + "'");
  }
  return url;
}

std::vector<std::pair<std::string, std::string>> Url::QueryParams() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& part : text::Split(query, '&')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      out.emplace_back(PercentDecode(part, true), "");
    } else {
      out.emplace_back(PercentDecode(std::string_view(part).substr(0, eq), true),
                       PercentDecode(std::string_view(part).substr(eq + 1), true));
    }
  }
  return out;
}

std::optional<std::string> Url::QueryParam(std::string_view key) const {
  for (auto& [k, v] : QueryParams()) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string PercentDecode(std::string_view s, bool form_encoded) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '%' && i + 2 < s.size()) {
      const int hi = HexValue(s[i + 1]);
      const int lo = HexValue(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    if (c == '+' && form_encoded) {
      out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string PercentEncode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(c);
    } else {
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 0xF]);
    }
  }
  return out;
}

std::string CanonicalizeUrl(std::string_view raw) {
  Url url = Url::Parse(raw);
  std::string out = url.scheme + "://" + url.host;
  if (!url.port.empty()) out += ":" + url.port;
  out += url.path;
  if (!url.query.empty()) out += "?" + url.query;
  return out;
}

}  // namespace voidscope
