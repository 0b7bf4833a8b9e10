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

#include "voidscope/fetchers.hpp"

#include <curl/curl.h>

#include <cstdlib>
#include <mutex>

#include "voidscope/error.hpp"
#include "voidscope/io.hpp"
#include "voidscope/json_io.hpp"
#include "voidscope/url.hpp"

namespace voidscope {

namespace {

std::size_t WriteBody(char* data, std::size_t size, std::size_t n, void* user) {
  static_cast<std::string*>(user)->append(data, size * n);
  return size * n;
}

void ReplaceAll(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

HttpFetcherOptions HttpFetcherOptions::FromEnvironment() {
  HttpFetcherOptions options;
  if (const char* ua = std::getenv("VOIDSCOPE_USER_AGENT"); ua && *ua) {
    options.user_agent = ua;
  }
  if (const char* proxy = std::getenv("VOIDSCOPE_PROXY"); proxy && *proxy) {
    options.proxy = proxy;
  }
  return options;
}

HttpFetcher::HttpFetcher(HttpFetcherOptions options) : options_(std::move(options)) {
  static std::once_flag init;
  std::call_once(init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
  curl_ = curl_easy_init();
  if (!curl_) throw Error(ErrorCode::kConfig, "curl_easy_init failed");
}

HttpFetcher::~HttpFetcher() { curl_easy_cleanup(static_cast<CURL*>(curl_)); }

std::string HttpFetcher::RequestUrl(std::string_view query, int result_count) const {
  std::string url = options_.url_template;
  ReplaceAll(url, "{query}", PercentEncode(query));
  ReplaceAll(url, "{num}", std::to_string(result_count));
  return url;
}

FetchResponse HttpFetcher::Fetch(std::string_view query, int result_count) {
  CURL* curl = static_cast<CURL*>(curl_);
  curl_easy_reset(curl);
  const std::string url = RequestUrl(query, result_count);
  FetchResponse response;
  curl_slist* headers = nullptr;
  for (const auto& h : options_.headers) headers = curl_slist_append(headers, h.c_str());

  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_MAXREDIRS, 5L);
  curl_easy_setopt(curl, CURLOPT_TIMEOUT_MS, options_.timeout_ms);
  curl_easy_setopt(curl, CURLOPT_ACCEPT_ENCODING, "");
  curl_easy_setopt(curl, CURLOPT_USERAGENT, options_.user_agent.c_str());
  if (!options_.proxy.empty()) curl_easy_setopt(curl, CURLOPT_PROXY, options_.proxy.c_str());
  if (headers) curl_easy_setopt(curl, CURLOPT_HTTPHEADER, headers);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, WriteBody);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &response.body);

  const CURLcode rc = curl_easy_perform(curl);
  if (headers) curl_slist_free_all(headers);
  if (rc != CURLE_OK) throw FetchError(curl_easy_strerror(rc));
  long status = 0;
  curl_easy_getinfo(curl, CURLINFO_RESPONSE_CODE, &status);
  response.status = static_cast<int>(status);
  return response;
}

ReplayFetcher::ReplayFetcher(const std::filesystem::path& dir) : dir_(dir) {
  const auto index = dir / "index.ndjson";
  if (!std::filesystem::exists(index)) {
    throw Error(ErrorCode::kMissingDependency, "no replay index at " + index.string());
  }
  for (const Json& j : ReadNdjson(index)) {
    entries_[{j.at("step").get<int>(), j.at("query").get<std::string>()}] = {
        j.value("status", 200), j.value("file", std::string())};
  }
}

void ReplayFetcher::BeginTask(const CrawlTask& task) { step_ = task.step_index; }

FetchResponse ReplayFetcher::Fetch(std::string_view query, int /*result_count*/) {
  auto it = entries_.find({step_, std::string(query)});
  if (it == entries_.end()) {
    throw FetchError("no recording for step " + std::to_string(step_) + ": " +
                     std::string(query));
  }
  FetchResponse response;
  response.status = it->second.first;
  if (!it->second.second.empty()) response.body = ReadTextFile(dir_ / it->second.second);
  return response;
}

}  // namespace voidscope
