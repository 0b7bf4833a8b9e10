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

#include <gtest/gtest.h>

#include <random>

#include "oracles/rbo_oracle.hpp"
#include "oracles/test_support.hpp"
#include "voidscope/error.hpp"
#include "voidscope/stability.hpp"

namespace voidscope {
namespace {

using List = std::vector<std::string>;

TEST(Rbo, HandComputedValues) {
  EXPECT_DOUBLE_EQ(Rbo(List{"a", "b", "c"}, List{"b", "a", "d"}), 5.0 / 9.0);
  EXPECT_DOUBLE_EQ(Rbo(List{"a", "b"}, List{"a"}), 0.75);
  EXPECT_DOUBLE_EQ(Rbo(List{"a", "b", "c"}, List{"a", "b", "c"}), 1.0);
  EXPECT_DOUBLE_EQ(Rbo(List{"a"}, List{"b"}), 0.0);
  EXPECT_DOUBLE_EQ(Rbo(List{}, List{}), 1.0);
  EXPECT_DOUBLE_EQ(Rbo(List{"a"}, List{}), 0.0);
}

TEST(Rbo, DuplicateItemsRejected) {
  try {
    Rbo(List{"a", "a"}, List{"a"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Rbo, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto s = testsupport::RandomRankedList(rng, 20, 30);
    const auto u = testsupport::RandomRankedList(rng, 20, 30);
    EXPECT_NEAR(Rbo(s, u), oracle::BruteForceRbo(s, u), 1e-12);
    EXPECT_EQ(Rbo(s, u), Rbo(u, s));
  }
}

TEST(BuildRboMatrix, CompactsGapsAndTruncates) {
  const RboMatrix m = BuildRboMatrix(
      "q", {{0, {"a", "b", "c"}}, {2, {"a", "b", "d"}}, {3, {"x", "y", "z"}}}, 2);
  EXPECT_EQ(m.steps, (std::vector<int>{0, 2, 3}));
  EXPECT_EQ(m.timesteps(), 3u);
  EXPECT_DOUBLE_EQ(m.x.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.x.at(0, 1), 1.0);  // depth 2 ignores c vs d
  EXPECT_DOUBLE_EQ(m.x.at(1, 2), 0.0);
  EXPECT_EQ(m.x.at(2, 1), m.x.at(1, 2));
}

TEST(WindowedRbo, MatchesLiteralFormula) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 12);
    RboMatrix m;
    m.query_id = "q";
    m.x.n = static_cast<std::size_t>(n);
    m.x.values.assign(m.x.n * m.x.n, 1.0);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 1.0));
    for (int i = 0; i < n; ++i) {
      m.steps.push_back(i);
      for (int j = i + 1; j < n; ++j) {
        const double v = unit(rng);
        m.x.at(i, j) = m.x.at(j, i) = v;
        dense[i][j] = dense[j][i] = v;
      }
    }
    for (int k = 1; k < n; ++k) {
      EXPECT_NEAR(WindowedRbo(m, k), oracle::LiteralWindowedRbo(dense, k), 1e-14);
    }
    EXPECT_THROW(WindowedRbo(m, n), Error);
    EXPECT_THROW(WindowedRbo(m, 0), Error);
  }
}

TEST(WindowedRbo, IdenticalListsScoreOneAtKOne) {
  const RboMatrix m = BuildRboMatrix("q", {{0, {"a"}}, {1, {"a"}}, {2, {"a"}}});
  EXPECT_DOUBLE_EQ(WindowedRbo(m, 1), 1.0);
  // Boundary terms are missing for K = 2: (2 + 2 + 2 + 0) / (2 * 2 * 2).
  EXPECT_DOUBLE_EQ(WindowedRbo(m, 2), 6.0 / 8.0);
}

TEST(Jaccard, Basics) {
  EXPECT_DOUBLE_EQ(Jaccard({}, {}), 1.0);
  EXPECT_DOUBLE_EQ(Jaccard({"a", "b"}, {"b", "c"}), 1.0 / 3.0);
  const auto m = JaccardMatrix({{"a"}, {"a", "b"}, {}});
  EXPECT_DOUBLE_EQ(m.at(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.at(2, 0), 0.0);
  EXPECT_THROW(JaccardMatrix({{"a"}}), Error);
}

TEST(UrlChurn, FractionsMeanAndPopulationSd) {
  const std::map<std::string, std::set<std::string>> a = {
      {"q1", {"x", "y"}}, {"q2", {"x"}}, {"q3", {}}, {"q4", {"z"}}};
  const std::map<std::string, std::set<std::string>> b = {
      {"q1", {"x", "w"}}, {"q2", {"x"}}, {"q3", {"x"}}};
  const ChurnReport r = UrlChurn(a, b);
  EXPECT_EQ(r.per_query.size(), 2u);
  EXPECT_DOUBLE_EQ(r.per_query.at("q1"), 0.5);
  EXPECT_DOUBLE_EQ(r.mean, 0.75);
  EXPECT_DOUBLE_EQ(r.sd, 0.25);
  EXPECT_EQ(r.skipped_empty, 1u);
  try {
    UrlChurn({{"a", {"x"}}}, {{"b", {"x"}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(ComputeStability, ClipsWindowAndGroups) {
  std::mt19937_64 rng(3);
  auto corpus = testsupport::ChurnCorpus(rng, 0.3, 4, 6);
  corpus.push_back(BuildRboMatrix("short", {{0, {"a"}}, {1, {"b"}}, {4, {"a"}}}));
  const std::map<std::string, std::string> groups = {{"q0/", "0"}, {"q1/", "0"}, {"short", "1+"}};
  const StabilityReport r = ComputeStability(corpus, 12, groups);
  EXPECT_EQ(r.window_max, 2);
  EXPECT_EQ(r.n, 5u);
  ASSERT_EQ(r.rbo_k.size(), 2u);
  EXPECT_EQ(r.rbo_k.at(1), RboK(corpus, 1));
  EXPECT_EQ(r.rbo_k_by_group.at("1+").at(2), WindowedRbo(corpus.back(), 2));
  EXPECT_EQ(r.groups.size(), 3u);
  EXPECT_FALSE(r.normalization.empty());
  EXPECT_THROW(ComputeStability({}, 3), Error);
}

}  // namespace
}  // namespace voidscope
