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

#include "oracles/dependency_oracle.hpp"

namespace oracle {

using voidscope::BannerTimeline;
using voidscope::CutoffPosition;
using voidscope::RankCutoffCondition;
using voidscope::UrlList;

namespace {

std::vector<std::string> Universe(const BannerTimeline& t) {
  std::set<std::string> all;
  for (const auto& l : t.bannered) all.insert(l.begin(), l.end());
  for (const auto& l : t.unbannered) all.insert(l.begin(), l.end());
  return {all.begin(), all.end()};
}

bool Has(const UrlList& l, const std::string& url) {
  for (const auto& u : l) {
    if (u == url) return true;
  }
  return false;
}

// 1-based rank of url in l, 0 when absent.
int RankOf(const UrlList& l, const std::string& url) {
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l[i] == url) return static_cast<int>(i) + 1;
  }
  return 0;
}

bool HasAt(const UrlList& l, const std::string& url, CutoffPosition pos, int cutoff) {
  const int r = RankOf(l, url);
  if (r == 0) return false;
  return (r < cutoff) == (pos == CutoffPosition::kAboveCutoff);
}

}  // namespace

std::set<std::string> EnumerateSingles(const BannerTimeline& t) {
  std::set<std::string> out;
  for (const auto& url : Universe(t)) {
    bool ok = true;
    for (const auto& s : t.bannered) ok = ok && Has(s, url);
    for (const auto& r : t.unbannered) ok = ok && !Has(r, url);
    if (ok) out.insert(url);
  }
  return out;
}

std::set<std::pair<std::string, std::string>> EnumeratePairs(const BannerTimeline& t,
                                                             bool independent) {
  const auto u = Universe(t);
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      bool ok = true;
      for (const auto& s : t.bannered) ok = ok && Has(s, u[i]) && Has(s, u[j]);
      if (independent) {
        bool a_seen = false, b_seen = false;
        for (const auto& r : t.unbannered) {
          a_seen = a_seen || Has(r, u[i]);
          b_seen = b_seen || Has(r, u[j]);
        }
        ok = ok && !(a_seen && b_seen);
      } else {
        for (const auto& r : t.unbannered) ok = ok && !(Has(r, u[i]) && Has(r, u[j]));
      }
      if (ok) out.insert({u[i], u[j]});
    }
  }
  return out;
}

std::set<RankCutoffCondition> EnumerateCutoffPairs(const BannerTimeline& t, int cutoff) {
  const auto u = Universe(t);
  const CutoffPosition positions[] = {CutoffPosition::kAboveCutoff,
                                      CutoffPosition::kAtOrBelowCutoff};
  std::set<RankCutoffCondition> out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      for (CutoffPosition pa : positions) {
        for (CutoffPosition pb : positions) {
          bool ok = true;
          for (const auto& s : t.bannered) {
            ok = ok && HasAt(s, u[i], pa, cutoff) && HasAt(s, u[j], pb, cutoff);
          }
          for (const auto& r : t.unbannered) {
            ok = ok && !(HasAt(r, u[i], pa, cutoff) && HasAt(r, u[j], pb, cutoff));
          }
          if (ok) out.insert({cutoff, u[i], pa, u[j], pb});
        }
      }
    }
  }
  return out;
}

bool EnumerateCutoffSingles(const BannerTimeline& t, int cutoff) {
  for (const auto& url : Universe(t)) {
    for (CutoffPosition p : {CutoffPosition::kAboveCutoff, CutoffPosition::kAtOrBelowCutoff}) {
      bool ok = true;
      for (const auto& s : t.bannered) ok = ok && HasAt(s, url, p, cutoff);
      for (const auto& r : t.unbannered) ok = ok && !HasAt(r, url, p, cutoff);
      if (ok) return true;
    }
  }
  return false;
}

}  // namespace oracle
