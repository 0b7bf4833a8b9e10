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

#include "voidscope/dependency.hpp"

#include <algorithm>

#include "voidscope/error.hpp"

namespace voidscope {

namespace {

constexpr std::string_view kTag = "|rank<c";

using ItemSet = std::set<std::string>;

ItemSet Items(const UrlList& list, int cutoff) {
  ItemSet out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const int rank = static_cast<int>(i) + 1;
    out.insert(rank < cutoff ? list[i] + std::string(kTag) : list[i]);
  }
  return out;
}

std::vector<ItemSet> AllItems(const std::vector<UrlList>& lists, int cutoff) {
  std::vector<ItemSet> out;
  out.reserve(lists.size());
  for (const auto& l : lists) out.push_back(Items(l, cutoff));
  return out;
}

// Items present in every set.
ItemSet Intersection(const std::vector<ItemSet>& sets) {
  if (sets.empty()) return {};
  ItemSet acc = sets.front();
  for (std::size_t i = 1; i < sets.size() && !acc.empty(); ++i) {
    ItemSet next;
    std::set_intersection(acc.begin(), acc.end(), sets[i].begin(), sets[i].end(),
                          std::inserter(next, next.end()));
    acc.swap(next);
  }
  return acc;
}

bool ContainsAll(const ItemSet& set, const std::vector<std::string>& items) {
  return std::all_of(items.begin(), items.end(),
                     [&](const std::string& i) { return set.contains(i); });
}

std::pair<std::string, CutoffPosition> Untag(const std::string& item) {
  if (item.ends_with(kTag)) {
    return {item.substr(0, item.size() - kTag.size()), CutoffPosition::kAboveCutoff};
  }
  return {item, CutoffPosition::kAtOrBelowCutoff};
}

// Sorted combinations of `order` candidates not jointly present in any
// unbannered item set.
std::set<std::vector<std::string>> Combinations(const ItemSet& candidates,
                                                const std::vector<ItemSet>& unbannered,
                                                int order) {
  std::set<std::vector<std::string>> out;
  const std::vector<std::string> pool(candidates.begin(), candidates.end());
  const std::size_t k = static_cast<std::size_t>(order);
  if (order < 1 || pool.size() < k) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<std::string> combo(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) combo[i] = pool[idx[i]];
    const bool excluded = std::any_of(unbannered.begin(), unbannered.end(),
                                      [&](const ItemSet& r) { return ContainsAll(r, combo); });
    if (!excluded) out.insert(combo);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pool.size() - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace

void BannerTimeline::Validate() const {
  if (bannered.empty() || unbannered.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                query_id + ": explanation needs bannered and unbannered SERPs");
  }
}

UrlPair MakePair(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

std::set<std::string> SingleUrlExplanation(const BannerTimeline& t) {
  t.Validate();
  ItemSet out = Intersection(AllItems(t.bannered, 1));
  for (const auto& r : t.unbannered) {
    for (const auto& u : r) out.erase(u);
  }
  return out;
}

std::set<UrlPair> PairExplanation(const BannerTimeline& t, PairMode mode) {
  t.Validate();
  const ItemSet candidates = Intersection(AllItems(t.bannered, 1));
  const std::vector<ItemSet> unbannered = AllItems(t.unbannered, 1);
  std::set<UrlPair> out;
  if (mode == PairMode::kJoint) {
    for (const auto& combo : Combinations(candidates, unbannered, 2)) {
      out.insert(MakePair(combo[0], combo[1]));
    }
    return out;
  }
  ItemSet anywhere;
  for (const auto& r : unbannered) anywhere.insert(r.begin(), r.end());
  for (auto a = candidates.begin(); a != candidates.end(); ++a) {
    for (auto b = std::next(a); b != candidates.end(); ++b) {
      if (anywhere.contains(*a) && anywhere.contains(*b)) continue;
      out.insert(MakePair(*a, *b));
    }
  }
  return out;
}

std::set<RankCutoffCondition> RankCutoffExplanation(const BannerTimeline& t, int cutoff) {
  t.Validate();
  if (cutoff < 1) throw Error(ErrorCode::kInvalidArgument, "cutoff must be >= 1");
  std::set<RankCutoffCondition> out;
  for (const auto& combo : OrderExplanation(t, 2, cutoff)) {
    auto [url_a, pos_a] = Untag(combo[0]);
    auto [url_b, pos_b] = Untag(combo[1]);
    if (url_b < url_a || (url_a == url_b && pos_b < pos_a)) {
      std::swap(url_a, url_b);
      std::swap(pos_a, pos_b);
    }
    out.insert({cutoff, url_a, pos_a, url_b, pos_b});
  }
  return out;
}

std::set<std::vector<std::string>> OrderExplanation(const BannerTimeline& t, int order,
                                                    int cutoff) {
  t.Validate();
  if (order < 1) throw Error(ErrorCode::kInvalidArgument, "order must be >= 1");
  if (cutoff < 1) throw Error(ErrorCode::kInvalidArgument, "cutoff must be >= 1");
  return Combinations(Intersection(AllItems(t.bannered, cutoff)),
                      AllItems(t.unbannered, cutoff), order);
}

bool ExplainedByPair(const BannerTimeline& t, PairMode mode) {
  return !PairExplanation(t, mode).empty() || !SingleUrlExplanation(t).empty();
}

bool ExplainedAtCutoff(const BannerTimeline& t, int cutoff) {
  return !RankCutoffExplanation(t, cutoff).empty() || !OrderExplanation(t, 1, cutoff).empty();
}

std::map<std::string, Tally> CooccurrenceTally(const BannerTimeline& t) {
  t.Validate();
  std::map<std::string, Tally> out;
  for (const auto& s : t.bannered) {
    for (const auto& u : ItemSet(s.begin(), s.end())) ++out[u].banner_count;
  }
  for (const auto& r : t.unbannered) {
    for (const auto& u : ItemSet(r.begin(), r.end())) ++out[u].no_banner_count;
  }
  return out;
}

}  // namespace voidscope
