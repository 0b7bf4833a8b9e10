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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace voidscope {

// An absolute http(s)-style URL split into its components. Components are
// kept raw (still percent-encoded) except host, which is lower-cased.
struct Url {
  std::string scheme;
  std::string host;
  std::string port;
  std::string path;
  std::string query;
  std::string fragment;

  // Throws Error(kMalformedUrl) on inputs without a scheme or host.
  static Url Parse(std::string_view input);

  // Decoded key/value pairs from the query string, in order.
  std::vector<std::pair<std::string, std::string>> QueryParams() const;
  std::optional<std::string> QueryParam(std::string_view key) const;
};

// Percent-decoding; '+' becomes a space when form_encoded is set.
// Invalid escapes are passed through unchanged.
std::string PercentDecode(std::string_view s, bool form_encoded);
std::string PercentEncode(std::string_view s);

// Lower-cases scheme and host, drops the fragment and keeps the query
// string. Used wherever URL set membership matters.
std::string CanonicalizeUrl(std::string_view url);

}  // namespace voidscope
