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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "voidscope/ingest.hpp"

namespace voidscope {

struct Cadence {
  enum class Kind { kSinglePass, kRepeated };

  Kind kind = Kind::kSinglePass;
  std::int64_t interval_seconds = 0;
  int steps = 1;

  static Cadence SinglePass() { return {}; }
  static Cadence Repeated(std::int64_t interval_seconds, int steps) {
    return {Kind::kRepeated, interval_seconds, steps};
  }
  int step_count() const { return kind == Kind::kSinglePass ? 1 : steps; }
};

struct CrawlConfig {
  std::string wave_id;
  Cadence cadence;
  int results_per_query = 10;
  int politeness_delay_ms = 1000;
  // Recorded with the plan; collection location is not enforced.
  std::string location_label;
  Engine engine = Engine::kGoogle;
};

struct CrawlTask {
  int step_index = 0;
  std::size_t task_index = 0;  // position in the plan's full task order
  std::string query_text;
};

struct CrawlPlan {
  std::string wave_id;
  std::vector<Query> queries;
  Cadence cadence;
  // A request; engines may return fewer results.
  int results_per_query = 10;
  int politeness_delay_ms = 1000;
  std::string location_label;
  Engine engine = Engine::kGoogle;

  std::size_t task_count() const;
  // Step-major: every query for step 0, then every query for step 1, ...
  std::vector<CrawlTask> Tasks() const;
  void Validate() const;
};

// Throws Error(kEmptyPlan) without queries, Error(kInvalidCadence) for a
// repeated cadence with steps < 1 or a non-positive interval.
CrawlPlan ScheduleWave(std::span<const Query> queries, const CrawlConfig& config);

struct CrawlRecord {
  std::string wave_id;
  int step_index = 0;
  std::string query_text;
  std::string fetched_at;  // ISO-8601 UTC
  int http_status = 0;
  std::string raw_html_ref;  // content hash; empty for gaps
  bool gap = false;
  int attempts = 0;

  std::tuple<std::string, int, std::string> key() const {
    return {wave_id, step_index, query_text};
  }
};

// ---------------------------------------------------------------------------
// Fetching.

struct FetchResponse {
  int status = 0;
  std::string body;
};

// Transport-level failure (DNS, TLS, timeout). Counts as a failed attempt.
class FetchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  // Called once per task before its first attempt.
  virtual void BeginTask(const CrawlTask& /*task*/) {}
  virtual FetchResponse Fetch(std::string_view query, int result_count) = 0;
};

// Time source and sleeping, injectable so tests never wait.
class CrawlClock {
 public:
  virtual ~CrawlClock() = default;
  virtual std::chrono::system_clock::time_point Now() = 0;
  virtual void SleepFor(std::chrono::milliseconds duration) = 0;
};

class SystemClock final : public CrawlClock {
 public:
  std::chrono::system_clock::time_point Now() override;
  void SleepFor(std::chrono::milliseconds duration) override;
};

// Virtual time: Now() advances only through SleepFor(). Starts at `start`.
class VirtualClock final : public CrawlClock {
 public:
  explicit VirtualClock(std::chrono::system_clock::time_point start) : now_(start) {}
  std::chrono::system_clock::time_point Now() override { return now_; }
  void SleepFor(std::chrono::milliseconds duration) override;
  const std::vector<std::chrono::milliseconds>& sleeps() const { return sleeps_; }

 private:
  std::chrono::system_clock::time_point now_;
  std::vector<std::chrono::milliseconds> sleeps_;
};

std::string FormatUtc(std::chrono::system_clock::time_point t);
// Inverse of FormatUtc. Throws Error(kInvalidArgument).
std::chrono::system_clock::time_point ParseUtc(std::string_view text);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{2000};
  double multiplier = 2.0;

  std::chrono::milliseconds BackoffAfter(int failed_attempt) const;
};

// ---------------------------------------------------------------------------
// Persistence.

// Gzip-compressed pages keyed by SHA-256 of the uncompressed bytes.
class BlobStore {
 public:
  explicit BlobStore(std::filesystem::path root);

  // Returns the content id. Identical content is stored once.
  std::string Put(std::string_view html);
  std::string Get(std::string_view id) const;
  bool Contains(std::string_view id) const;
  std::filesystem::path PathFor(std::string_view id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

std::string GzipCompress(std::string_view data);
std::string GzipDecompress(std::string_view data);

// Append-only NDJSON log of CrawlRecord, flushed and fsync'ed per record.
class CrawlManifest {
 public:
  explicit CrawlManifest(std::filesystem::path path);

  // An unterminated last line (a write interrupted by a crash) is ignored.
  std::vector<CrawlRecord> Load() const;
  // Truncates an unterminated last line so appends start on a fresh line.
  void RepairTail();
  void Append(const CrawlRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// A store directory holds blobs/ and manifest.ndjson.
struct CrawlStore {
  explicit CrawlStore(const std::filesystem::path& dir);

  BlobStore blobs;
  CrawlManifest manifest;
};

struct CrawlSummary {
  std::size_t fetched = 0;   // tasks stored with a page in this run
  std::size_t skipped = 0;   // tasks already in the manifest
  std::size_t gaps = 0;
  std::size_t fetch_calls = 0;
};

// Executes every task of the plan not yet present in the store's manifest.
// Each record (and its blob) is persisted before on_record is invoked and
// before the next task starts. Requests are serialized per plan (one engine)
// with the politeness delay between consecutive requests; failed fetches are
// retried with exponential backoff and become gap records.
CrawlSummary RunCrawl(const CrawlPlan& plan, Fetcher& fetcher, CrawlStore& store,
                      CrawlClock& clock, const RetryPolicy& retry = {},
                      const std::function<void(const CrawlRecord&)>& on_record = {});

}  // namespace voidscope
