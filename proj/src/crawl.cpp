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

#include "voidscope/crawl.hpp"

#include <cmath>
#include <ctime>
#include <thread>

#include "voidscope/error.hpp"

namespace voidscope {

std::size_t CrawlPlan::task_count() const {
  return queries.size() * static_cast<std::size_t>(cadence.step_count());
}

std::vector<CrawlTask> CrawlPlan::Tasks() const {
  std::vector<CrawlTask> tasks;
  tasks.reserve(task_count());
  for (int step = 0; step < cadence.step_count(); ++step) {
    for (const Query& q : queries) {
      tasks.push_back({step, tasks.size(), q.text});
    }
  }
  return tasks;
}

void CrawlPlan::Validate() const {
  if (queries.empty()) throw Error(ErrorCode::kEmptyPlan, "plan has no queries");
  if (cadence.kind == Cadence::Kind::kRepeated &&
      (cadence.steps < 1 || cadence.interval_seconds <= 0)) {
    throw Error(ErrorCode::kInvalidCadence,
                "repeated cadence needs steps >= 1 and interval_seconds > 0");
  }
  if (results_per_query < 1 || results_per_query > 100) {
    throw Error(ErrorCode::kInvalidArgument, "results_per_query must be in 1..100");
  }
  if (politeness_delay_ms < 0) {
    throw Error(ErrorCode::kInvalidArgument, "politeness_delay_ms must be >= 0");
  }
  std::set<std::string> seen;
  for (const Query& q : queries) {
    if (!seen.insert(q.text).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate query in plan: " + q.text);
    }
  }
}

CrawlPlan ScheduleWave(std::span<const Query> queries, const CrawlConfig& config) {
  CrawlPlan plan;
  plan.wave_id = config.wave_id;
  plan.queries.assign(queries.begin(), queries.end());
  plan.cadence = config.cadence;
  plan.results_per_query = config.results_per_query;
  plan.politeness_delay_ms = config.politeness_delay_ms;
  plan.location_label = config.location_label;
  plan.engine = config.engine;
  plan.Validate();
  return plan;
}

std::chrono::system_clock::time_point SystemClock::Now() {
  return std::chrono::system_clock::now();
}

void SystemClock::SleepFor(std::chrono::milliseconds duration) {
  if (duration.count() > 0) std::this_thread::sleep_for(duration);
}

void VirtualClock::SleepFor(std::chrono::milliseconds duration) {
  if (duration.count() <= 0) return;
  sleeps_.push_back(duration);
  now_ += duration;
}

std::string FormatUtc(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::chrono::system_clock::time_point ParseUtc(std::string_view text) {
  std::tm tm{};
  const std::string copy(text);
  const char* end = strptime(copy.c_str(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  if (end == nullptr || *end != '\0') {
    throw Error(ErrorCode::kInvalidArgument, "expected YYYY-MM-DDTHH:MM:SSZ, got '" + copy + "'");
  }
  return std::chrono::system_clock::from_time_t(timegm(&tm));
}

std::chrono::milliseconds RetryPolicy::BackoffAfter(int failed_attempt) const {
  const double scale = std::pow(multiplier, failed_attempt - 1);
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(std::llround(initial_backoff.count() * scale)));
}

namespace {

using TimePoint = std::chrono::system_clock::time_point;

void SleepUntil(CrawlClock& clock, TimePoint target) {
  const auto now = clock.Now();
  if (target > now) {
    clock.SleepFor(std::chrono::ceil<std::chrono::milliseconds>(target - now));
  }
}

}  // namespace

CrawlSummary RunCrawl(const CrawlPlan& plan, Fetcher& fetcher, CrawlStore& store,
                      CrawlClock& clock, const RetryPolicy& retry,
                      const std::function<void(const CrawlRecord&)>& on_record) {
  plan.Validate();
  if (retry.max_attempts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "retry needs at least one attempt");
  }
  store.manifest.RepairTail();
  std::set<std::tuple<std::string, int, std::string>> done;
  for (const CrawlRecord& r : store.manifest.Load()) done.insert(r.key());

  CrawlSummary summary;
  const auto delay = std::chrono::milliseconds(plan.politeness_delay_ms);
  const auto interval = std::chrono::seconds(plan.cadence.interval_seconds);
  std::optional<TimePoint> last_request;
  std::optional<TimePoint> origin;  // start of the first step fetched in this run
  int origin_step = 0;
  int current_step = -1;

  for (const CrawlTask& task : plan.Tasks()) {
    CrawlRecord record;
    record.wave_id = plan.wave_id;
    record.step_index = task.step_index;
    record.query_text = task.query_text;
    if (done.contains(record.key())) {
      ++summary.skipped;
      continue;
    }

    if (task.step_index != current_step) {
      if (!origin) {
        origin = clock.Now();
        origin_step = task.step_index;
      } else {
        SleepUntil(clock, *origin + interval * (task.step_index - origin_step));
      }
      current_step = task.step_index;
    }

    fetcher.BeginTask(task);
    std::optional<FetchResponse> ok;
    int status = 0;
    TimePoint fetched_at = clock.Now();
    for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
      if (last_request) SleepUntil(clock, *last_request + delay);
      fetched_at = clock.Now();
      last_request = fetched_at;
      ++summary.fetch_calls;
      record.attempts = attempt;
      try {
        FetchResponse response = fetcher.Fetch(task.query_text, plan.results_per_query);
        status = response.status;
        if (status >= 200 && status < 300) {
          ok = std::move(response);
          break;
        }
      } catch (const FetchError&) {
        status = 0;
      }
      if (attempt < retry.max_attempts) clock.SleepFor(retry.BackoffAfter(attempt));
    }

    record.fetched_at = FormatUtc(fetched_at);
    record.http_status = status;
    if (ok) {
      record.raw_html_ref = store.blobs.Put(ok->body);
      ++summary.fetched;
    } else {
      record.gap = true;
      ++summary.gaps;
    }
    store.manifest.Append(record);
    done.insert(record.key());
    if (on_record) on_record(record);
  }
  return summary;
}

}  // namespace voidscope
