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

#include <cmath>

#include "oracles/logit_oracle.hpp"
#include "oracles/test_support.hpp"
#include "voidscope/error.hpp"
#include "voidscope/ingest.hpp"
#include "voidscope/metrics.hpp"
#include "voidscope/regression.hpp"

namespace voidscope {
namespace {

SerpAggregate FullAggregate() {
  SerpAggregate a;
  a.avg_domain_quality = 0.75;
  a.rank_weighted_partisanship = -0.2;
  a.estimated_total_results_log10 = 6.0;
  a.avg_domain_traffic_log10 = 4.5;
  a.news_domain_count = 2;
  a.unique_domain_count = 8;
  return a;
}

TEST(Features, NamesPerTarget) {
  EXPECT_EQ(FeatureNames(LogitTarget::kLowQuality).size(), 9u);
  const auto rel = FeatureNames(LogitTarget::kLowRelevance);
  ASSERT_EQ(rel.size(), 10u);
  EXPECT_EQ(rel[3], "operator_flag");
  EXPECT_EQ(LogitTargetFromName("low_relevance"), LogitTarget::kLowRelevance);
  EXPECT_FALSE(LogitTargetFromName("nope"));
  EXPECT_EQ(LogitTargetName(LogitTarget::kLowQuality), "low_quality");
}

TEST(Features, AssemblesInNameOrder) {
  Query q = NormalizeQuery("site:example.org chemtrails");
  q.operators = DetectOperators(q);
  q.topics.conspiracy = true;
  const auto row = AssembleFeatures(q, FullAggregate(), LogitTarget::kLowRelevance, true);
  ASSERT_TRUE(row);
  EXPECT_EQ(row->y, 1);
  const std::vector<double> expected = {std::log10(1.0 + q.char_count), 1, 0, 1, 0.25, -0.2,
                                        6.0, 4.5, 2, 8};
  EXPECT_EQ(row->x, expected);
  const auto lq = AssembleFeatures(q, FullAggregate(), LogitTarget::kLowQuality, false);
  ASSERT_TRUE(lq);
  EXPECT_EQ(lq->x.size(), 9u);
  EXPECT_EQ(lq->y, 0);
}

TEST(Features, MissingFieldDropsRow) {
  SerpAggregate a = FullAggregate();
  a.avg_domain_traffic_log10.reset();
  std::string reason;
  EXPECT_FALSE(AssembleFeatures(NormalizeQuery("x"), a, LogitTarget::kLowQuality, true, &reason));
  EXPECT_EQ(reason, "avg_domain_traffic_log10");
}

TEST(FitL1Logit, InputErrors) {
  try {
    FitL1Logit({{1.0}, {2.0}}, {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClass);
  }
  try {
    FitL1Logit({{1.0}, {2.0, 3.0}}, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  EXPECT_THROW(FitL1Logit({{NAN}, {1.0}}, {0, 1}), Error);
  EXPECT_THROW(FitL1Logit({{1.0}, {0.0}}, {0, 1}, {.alpha = -1}), Error);
}

TEST(FitL1Logit, PlantedZeroAndSigns) {
  const auto data = testsupport::MakeSparseLogitData(17, 200);
  const LogitModel m = FitL1Logit(data.x, data.y, {.alpha = 0.1});
  ASSERT_TRUE(m.converged);
  EXPECT_EQ(m.coefficients[2], 0.0);
  EXPECT_GT(m.coefficients[0], 0);
  EXPECT_LT(m.coefficients[1], 0);
  EXPECT_GT(m.coefficients[3], 0);
  ASSERT_TRUE(m.pseudo_r2);
  EXPECT_GT(*m.pseudo_r2, 0);
  EXPECT_FALSE(m.conf_int);
  for (std::size_t i = 1; i < m.objective_trace.size(); ++i) {
    EXPECT_LE(m.objective_trace[i], m.objective_trace[i - 1] + 1e-12);
  }
}

TEST(FitL1Logit, MatchesCoordinateDescent) {
  const auto data = testsupport::MakeSparseLogitData(3, 400);
  for (double alpha : {0.005, 0.05}) {
    const LogitModel m = FitL1Logit(data.x, data.y, {.alpha = alpha});
    const auto ref = oracle::CoordinateDescentLogit(data.x, data.y, alpha);
    EXPECT_NEAR(m.intercept, ref.intercept, 1e-4);
    for (std::size_t j = 0; j < ref.coefficients.size(); ++j) {
      EXPECT_NEAR(m.coefficients[j], ref.coefficients[j], 1e-4) << "alpha " << alpha;
    }
  }
}

TEST(FitL1Logit, UnpenalizedMatchesNewtonWithIntervals) {
  const auto data = testsupport::MakeSparseLogitData(8, 500);
  const LogitModel m = FitL1Logit(data.x, data.y, {.alpha = 0});
  const auto ref = oracle::NewtonLogit(data.x, data.y);
  EXPECT_NEAR(m.intercept, ref.intercept, 1e-6);
  for (std::size_t j = 0; j < ref.coefficients.size(); ++j) {
    EXPECT_NEAR(m.coefficients[j], ref.coefficients[j], 1e-6);
  }
  ASSERT_TRUE(m.conf_int);
  ASSERT_EQ(m.conf_int->size(), 5u);
  EXPECT_LT((*m.conf_int)[1].first, m.coefficients[0]);
  EXPECT_GT((*m.conf_int)[1].second, m.coefficients[0]);
}

TEST(FitL1Logit, StandardizedCoefficientsInOriginalUnits) {
  auto data = testsupport::MakeSparseLogitData(4, 600);
  for (auto& row : data.x) row[0] *= 100.0;
  const LogitModel plain = FitL1Logit(data.x, data.y, {.alpha = 0});
  const LogitModel scaled = FitL1Logit(data.x, data.y, {.alpha = 0, .standardize = true});
  EXPECT_TRUE(scaled.standardized);
  for (std::size_t j = 0; j < plain.coefficients.size(); ++j) {
    EXPECT_NEAR(plain.coefficients[j], scaled.coefficients[j], 1e-5);
  }
}

TEST(Predict, SigmoidOfLinearScore) {
  LogitModel m;
  m.intercept = -1;
  m.coefficients = {2, 0.5};
  const auto p = Predict(m, {{0, 0}, {1, 2}});
  EXPECT_DOUBLE_EQ(p[0], Sigmoid(-1));
  EXPECT_DOUBLE_EQ(p[1], Sigmoid(2));
  EXPECT_THROW(Predict(m, {{1.0}}), Error);
  EXPECT_DOUBLE_EQ(Sigmoid(0), 0.5);
  EXPECT_GT(Sigmoid(-800), 0.0 - 1e-300);
}

}  // namespace
}  // namespace voidscope
