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

#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "voidscope/crawl.hpp"

namespace voidscope {

struct HttpFetcherOptions {
  // {query} is replaced by the percent-encoded query, {num} by the result count.
  std::string url_template = "https://www.google.com/search?q={query}&num={num}&hl=en";
  std::string user_agent = "voidscope/" VOIDSCOPE_VERSION;
  std::string proxy;
  std::vector<std::string> headers;
  long timeout_ms = 30000;

  // Reads VOIDSCOPE_USER_AGENT and VOIDSCOPE_PROXY when set.
  static HttpFetcherOptions FromEnvironment();
};

// Plain HTTPS GET through libcurl. Transport errors raise FetchError; HTTP
// error statuses are returned as responses.
class HttpFetcher final : public Fetcher {
 public:
  explicit HttpFetcher(HttpFetcherOptions options);
  ~HttpFetcher() override;
  HttpFetcher(const HttpFetcher&) = delete;
  HttpFetcher& operator=(const HttpFetcher&) = delete;

  FetchResponse Fetch(std::string_view query, int result_count) override;
  std::string RequestUrl(std::string_view query, int result_count) const;

 private:
  HttpFetcherOptions options_;
  void* curl_ = nullptr;
};

// Serves recorded pages. The directory holds index.ndjson with one object
// per recorded fetch:
//   {"step": 0, "query": "...", "status": 200, "file": "pages/x.html"}
// A missing "file" serves an empty body. Unknown (step, query) pairs raise
// FetchError.
class ReplayFetcher final : public Fetcher {
 public:
  explicit ReplayFetcher(const std::filesystem::path& dir);

  void BeginTask(const CrawlTask& task) override;
  FetchResponse Fetch(std::string_view query, int result_count) override;

 private:
  std::filesystem::path dir_;
  std::map<std::pair<int, std::string>, std::pair<int, std::string>> entries_;
  int step_ = 0;
};

}  // namespace voidscope
