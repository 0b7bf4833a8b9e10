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

#include <string>
#include <vector>

namespace oracle {

// Average overlap computed depth by depth from explicit prefix sets.
double BruteForceRbo(const std::vector<std::string>& s, const std::vector<std::string>& u);

// Windowed score straight from the definition, with T = n - 1:
//   (1 / 2KT) * sum_t sum_k (X[t,t-k] if t-k >= 0) + (X[t,t+k] if t+k <= T)
double LiteralWindowedRbo(const std::vector<std::vector<double>>& x, int window);

}  // namespace oracle
