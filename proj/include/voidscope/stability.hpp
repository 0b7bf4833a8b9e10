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

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace voidscope {

// Average overlap with persistence 1 over depth D = max(|s|, |u|). Two empty
// lists score 1. Throws Error(kInvalidArgument) if a list repeats an item.
double Rbo(std::span<const std::string> s, std::span<const std::string> u);

struct SymmetricMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // row-major n*n

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

struct RboMatrix {
  std::string query_id;
  std::vector<int> steps;  // observed step indices, ascending
  SymmetricMatrix x;

  std::size_t timesteps() const { return steps.size(); }
};

struct ObservedList {
  int step = 0;
  std::vector<std::string> urls;
};

// Gaps are simply absent from `observed`; indices compact to observed steps.
// depth > 0 truncates each list to its first `depth` items.
RboMatrix BuildRboMatrix(const std::string& query_id,
                         std::vector<ObservedList> observed, int depth = 0);

// Windowed score with T = last compacted index:
//   (1 / 2KT) * sum_{t=0..T} sum_{k=1..K} (1[t-k>=0] X[t,t-k] + 1[t+k<=T] X[t,t+k])
// Throws Error(kInvalidArgument) when K < 1 or K >= timesteps.
double WindowedRbo(const RboMatrix& x, int window);

// Mean of WindowedRbo over queries, summed in input order. Throws
// Error(kEmptyInput) on an empty list.
double RboK(std::span<const RboMatrix> matrices, int window);

double Jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Throws Error(kInvalidArgument) with fewer than two timesteps.
SymmetricMatrix JaccardMatrix(const std::vector<std::set<std::string>>& series);

struct ChurnReport {
  std::map<std::string, double> per_query;  // fraction of wave-a URLs kept
  double mean = 0;
  double sd = 0;  // population
  std::size_t skipped_empty = 0;  // shared queries with no wave-a URLs
};

// Throws Error(kEmptyInput) when the waves share no query.
ChurnReport UrlChurn(const std::map<std::string, std::set<std::string>>& wave_a,
                     const std::map<std::string, std::set<std::string>>& wave_b);

struct StabilityReport {
  std::size_t n = 0;
  int window_max = 0;  // largest K evaluated
  std::map<std::string, std::map<int, double>> per_query;
  std::map<int, double> rbo_k;
  std::map<std::string, std::string> groups;
  std::map<std::string, std::map<int, double>> rbo_k_by_group;
  std::string normalization;  // how T was chosen for the windowed score
};

// Evaluates K = 1..min(window_max, shortest timesteps - 1). `groups` maps
// query id to a band label; queries without a band are ungrouped.
StabilityReport ComputeStability(std::span<const RboMatrix> matrices, int window_max,
                                 const std::map<std::string, std::string>& groups = {});

}  // namespace voidscope
