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

#include <compare>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace voidscope {

using UrlList = std::vector<std::string>;

struct BannerTimeline {
  std::string query_id;
  std::vector<UrlList> bannered;    // S
  std::vector<UrlList> unbannered;  // R

  // Requires |S| >= 1 and |R| >= 1; throws Error(kInvalidArgument).
  void Validate() const;
};

// Unordered, first < second.
using UrlPair = std::pair<std::string, std::string>;
UrlPair MakePair(std::string a, std::string b);

// Q1: URLs present in every bannered SERP and in no unbannered SERP.
std::set<std::string> SingleUrlExplanation(const BannerTimeline& t);

enum class PairMode {
  kJoint,        // a pair is excluded when both URLs share an unbannered SERP
  kIndependent,  // excluded when both URLs appear anywhere in the unbannered SERPs
};

// Q2: pairs present together in every bannered SERP and not excluded by R.
std::set<UrlPair> PairExplanation(const BannerTimeline& t, PairMode mode = PairMode::kJoint);

enum class CutoffPosition { kAboveCutoff, kAtOrBelowCutoff };

struct RankCutoffCondition {
  int cutoff = 1;
  std::string url_a;
  CutoffPosition position_a = CutoffPosition::kAtOrBelowCutoff;
  std::string url_b;
  CutoffPosition position_b = CutoffPosition::kAtOrBelowCutoff;

  auto operator<=>(const RankCutoffCondition&) const = default;
};

// Q3: URLs at 1-based rank < c are tagged, so each SERP becomes a set of
// (url, tagged) items; returns the item pairs present in every bannered SERP
// and in no unbannered SERP. c = 1 tags nothing and reduces to Q2.
std::set<RankCutoffCondition> RankCutoffExplanation(const BannerTimeline& t, int cutoff);

// Whether the timeline is explained by some set of `order` items (1 = Q1,
// 2 = Q2). Witnesses are returned as sorted item lists. With
// `cutoff` > 1, items are tagged as in Q3.
std::set<std::vector<std::string>> OrderExplanation(const BannerTimeline& t, int order,
                                                    int cutoff = 1);

// Order-2 explanation counts when a pair exists or, degenerately, when Q1
// has a witness (a single URL with no partner present in every SERP).
bool ExplainedByPair(const BannerTimeline& t, PairMode mode = PairMode::kJoint);
bool ExplainedAtCutoff(const BannerTimeline& t, int cutoff);

struct Tally {
  int banner_count = 0;
  int no_banner_count = 0;

  friend bool operator==(const Tally&, const Tally&) = default;
};

std::map<std::string, Tally> CooccurrenceTally(const BannerTimeline& t);

}  // namespace voidscope
