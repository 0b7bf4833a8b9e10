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

#include "voidscope/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "voidscope/error.hpp"

namespace voidscope {

double Rbo(std::span<const std::string> s, std::span<const std::string> u) {
  const std::size_t depth = std::max(s.size(), u.size());
  if (depth == 0) return 1.0;
  std::unordered_set<std::string_view> seen_s;
  std::unordered_set<std::string_view> seen_u;
  std::size_t overlap = 0;
  double sum = 0;
  for (std::size_t d = 1; d <= depth; ++d) {
    if (d <= s.size()) {
      const std::string_view x = s[d - 1];
      if (!seen_s.insert(x).second) {
        throw Error(ErrorCode::kInvalidArgument, "ranked list repeats " + std::string(x));
      }
      overlap += seen_u.contains(x);
    }
    if (d <= u.size()) {
      const std::string_view y = u[d - 1];
      if (!seen_u.insert(y).second) {
        throw Error(ErrorCode::kInvalidArgument, "ranked list repeats " + std::string(y));
      }
      overlap += seen_s.contains(y);
    }
    sum += static_cast<double>(overlap) / static_cast<double>(d);
  }
  return sum / static_cast<double>(depth);
}

RboMatrix BuildRboMatrix(const std::string& query_id, std::vector<ObservedList> observed,
                         int depth) {
  std::sort(observed.begin(), observed.end(),
            [](const ObservedList& a, const ObservedList& b) { return a.step < b.step; });
  RboMatrix m;
  m.query_id = query_id;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (i > 0 && observed[i].step == observed[i - 1].step) {
      throw Error(ErrorCode::kInvalidArgument,
                  query_id + ": step " + std::to_string(observed[i].step) + " listed twice");
    }
    if (depth > 0 && observed[i].urls.size() > static_cast<std::size_t>(depth)) {
      observed[i].urls.resize(static_cast<std::size_t>(depth));
    }
    m.steps.push_back(observed[i].step);
  }
  const std::size_t n = observed.size();
  m.x.n = n;
  m.x.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.x.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = Rbo(observed[i].urls, observed[j].urls);
      m.x.at(i, j) = v;
      m.x.at(j, i) = v;
    }
  }
  return m;
}

double WindowedRbo(const RboMatrix& m, int window) {
  const std::size_t n = m.x.n;
  if (window < 1 || static_cast<std::size_t>(window) >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                m.query_id + ": window " + std::to_string(window) + " needs more than " +
                    std::to_string(window) + " timesteps, have " + std::to_string(n));
  }
  const long last = static_cast<long>(n) - 1;  // T
  double sum = 0;
  for (long t = 0; t <= last; ++t) {
    for (long k = 1; k <= window; ++k) {
      if (t - k >= 0) sum += m.x.at(static_cast<std::size_t>(t), static_cast<std::size_t>(t - k));
      if (t + k <= last) sum += m.x.at(static_cast<std::size_t>(t), static_cast<std::size_t>(t + k));
    }
  }
  return sum / (2.0 * window * static_cast<double>(last));
}

double RboK(std::span<const RboMatrix> matrices, int window) {
  if (matrices.empty()) throw Error(ErrorCode::kEmptyInput, "no queries for RBO_k");
  double sum = 0;
  for (const RboMatrix& m : matrices) sum += WindowedRbo(m, window);
  return sum / static_cast<double>(matrices.size());
}

double Jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.contains(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

SymmetricMatrix JaccardMatrix(const std::vector<std::set<std::string>>& series) {
  if (series.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "Jaccard matrix needs at least two timesteps");
  }
  SymmetricMatrix m;
  m.n = series.size();
  m.values.assign(m.n * m.n, 0.0);
  for (std::size_t i = 0; i < m.n; ++i) {
    m.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m.n; ++j) {
      const double v = Jaccard(series[i], series[j]);
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  }
  return m;
}

ChurnReport UrlChurn(const std::map<std::string, std::set<std::string>>& wave_a,
                     const std::map<std::string, std::set<std::string>>& wave_b) {
  ChurnReport report;
  bool shared = false;
  for (const auto& [query, urls] : wave_a) {
    auto it = wave_b.find(query);
    if (it == wave_b.end()) continue;
    shared = true;
    if (urls.empty()) {
      ++report.skipped_empty;
      continue;
    }
    std::size_t kept = 0;
    for (const auto& u : urls) kept += it->second.contains(u);
    report.per_query[query] = static_cast<double>(kept) / static_cast<double>(urls.size());
  }
  if (!shared) throw Error(ErrorCode::kEmptyInput, "waves share no query");
  if (report.per_query.empty()) return report;
  double sum = 0;
  for (const auto& [q, f] : report.per_query) sum += f;
  report.mean = sum / static_cast<double>(report.per_query.size());
  double ss = 0;
  for (const auto& [q, f] : report.per_query) ss += (f - report.mean) * (f - report.mean);
  report.sd = std::sqrt(ss / static_cast<double>(report.per_query.size()));
  return report;
}

StabilityReport ComputeStability(std::span<const RboMatrix> matrices, int window_max,
                                 const std::map<std::string, std::string>& groups) {
  if (matrices.empty()) throw Error(ErrorCode::kEmptyInput, "no queries for stability");
  std::size_t shortest = std::numeric_limits<std::size_t>::max();
  for (const RboMatrix& m : matrices) shortest = std::min(shortest, m.timesteps());
  if (shortest < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "every query needs at least two observed timesteps");
  }
  StabilityReport report;
  report.n = matrices.size();
  report.window_max = std::min(window_max, static_cast<int>(shortest) - 1);
  report.normalization =
      "T = last observed index (timesteps - 1); t runs over 0..T and the sum is "
      "divided by 2*K*T";
  std::map<std::string, std::vector<RboMatrix>> by_group;
  for (const RboMatrix& m : matrices) {
    if (auto it = groups.find(m.query_id); it != groups.end()) {
      report.groups[m.query_id] = it->second;
      by_group[it->second].push_back(m);
    }
  }
  for (int k = 1; k <= report.window_max; ++k) {
    for (const RboMatrix& m : matrices) report.per_query[m.query_id][k] = WindowedRbo(m, k);
    report.rbo_k[k] = RboK(matrices, k);
    for (const auto& [group, members] : by_group) {
      report.rbo_k_by_group[group][k] = RboK(members, k);
    }
  }
  return report;
}

}  // namespace voidscope
