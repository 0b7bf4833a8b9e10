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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "voidscope/ingest.hpp"
#include "voidscope/metrics.hpp"

namespace voidscope {

enum class LogitTarget { kLowQuality, kLowRelevance };

std::string_view LogitTargetName(LogitTarget target);
std::optional<LogitTarget> LogitTargetFromName(std::string_view name);

// Feature order for a target. operator_flag is only used for low-relevance
// targets. The intercept is fitted separately and not listed.
std::vector<std::string> FeatureNames(LogitTarget target);

struct FeatureRow {
  std::vector<double> x;
  int y = 0;
};

// Returns nothing when a required aggregate field is absent; `drop_reason`
// then names the missing field. avg_low_quality_score = 1 - avg quality.
std::optional<FeatureRow> AssembleFeatures(const Query& query, const SerpAggregate& agg,
                                           LogitTarget target, bool label,
                                           std::string* drop_reason = nullptr);

struct LogitOptions {
  double alpha = 0.1;
  double tolerance = 1e-8;
  int max_iterations = 10000;
  bool standardize = false;
};

struct LogitModel {
  std::vector<std::string> feature_names;
  double intercept = 0;
  std::vector<double> coefficients;  // original feature units
  double alpha = 0;
  bool standardized = false;
  bool converged = false;
  int iterations = 0;
  std::optional<double> pseudo_r2;  // McFadden; only when converged
  double log_likelihood = 0;
  double null_log_likelihood = 0;
  std::size_t n = 0;
  // Wald 95% intervals, intercept first; only for alpha = 0 fits.
  std::optional<std::vector<std::pair<double, double>>> conf_int;
  // Objective value after every accepted iterate.
  std::vector<double> objective_trace;
};

// Minimizes (1/n) * NLL(b0, w) + alpha * |w|_1 with an orthant-wise L-BFGS
// solver. Throws Error(kSingleClass) when y has one class,
// Error(kDimensionMismatch) for ragged rows, Error(kInvalidArgument) for
// non-finite values.
LogitModel FitL1Logit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      const LogitOptions& options = {},
                      std::vector<std::string> feature_names = {});

// Throws Error(kDimensionMismatch) when a row has the wrong width.
std::vector<double> Predict(const LogitModel& model,
                            const std::vector<std::vector<double>>& x);

double Sigmoid(double z);

}  // namespace voidscope
