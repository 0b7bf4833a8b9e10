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

#include "oracles/test_support.hpp"

#include <algorithm>
#include <cstdlib>
#include <unistd.h>

#include "voidscope/io.hpp"
#include "voidscope/regression.hpp"
#include "voidscope/text.hpp"

namespace testsupport {

using voidscope::BannerTimeline;
using voidscope::BannerType;

std::filesystem::path SourceDir() { return VOIDSCOPE_SOURCE_DIR; }

std::filesystem::path FixtureDir() { return SourceDir() / "tests" / "fixtures"; }

namespace {

std::filesystem::path TempRoot() {
  return std::filesystem::temp_directory_path() /
         ("voidscope-test-" + std::to_string(::getpid()));
}

void RemoveTempRoot() {
  std::error_code ignored;
  std::filesystem::remove_all(TempRoot(), ignored);
}

}  // namespace

std::filesystem::path FreshDir(std::string_view name) {
  static const bool registered = [] {
    if (!std::getenv("VOIDSCOPE_KEEP_TEST_DIRS")) std::atexit(RemoveTempRoot);
    return true;
  }();
  (void)registered;
  const auto dir = TempRoot() / std::string(name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

voidscope::PipelineConfig FixtureConfig(const std::filesystem::path& work_dir) {
  voidscope::PipelineConfig config =
      voidscope::LoadConfig(FixtureDir() / "pipeline" / "pipeline.conf");
  config.work_dir = work_dir;
  return config;
}

std::filesystem::path GoldenDir() { return SourceDir() / "tests" / "golden"; }

const std::vector<std::string>& GoldenArtifacts() {
  static const std::vector<std::string> kArtifacts = {
      "ingest/queries.ndjson",      "parse/serps.ndjson",
      "parse/quarantine.ndjson",    "aggregate/aggregates.ndjson",
      "stability/stability.json",   "explain/explain.json",
      "logit/low_quality.json",     "logit/low_relevance.json",
      "models/model_data.ndjson",   "report/report.json",
      "report/report.txt",          "report/void_labels.ndjson",
  };
  return kArtifacts;
}

std::string CompareWithGolden(const std::filesystem::path& work_dir) {
  std::string problems;
  for (const auto& name : GoldenArtifacts()) {
    const auto golden = GoldenDir() / name;
    const auto actual = work_dir / name;
    if (!std::filesystem::exists(golden)) {
      problems += "missing golden " + name + "\n";
    } else if (!std::filesystem::exists(actual)) {
      problems += "missing output " + name + "\n";
    } else if (voidscope::ReadTextFile(golden) != voidscope::ReadTextFile(actual)) {
      problems += "differs: " + name + "\n";
    }
  }
  return problems;
}

void WriteGolden(const std::filesystem::path& work_dir) {
  for (const auto& name : GoldenArtifacts()) {
    const auto target = GoldenDir() / name;
    std::filesystem::create_directories(target.parent_path());
    std::filesystem::copy_file(work_dir / name, target,
                               std::filesystem::copy_options::overwrite_existing);
  }
}

std::vector<std::string> RandomRankedList(std::mt19937_64& rng, int max_len, int pool) {
  std::vector<std::string> items;
  for (int i = 0; i < pool; ++i) items.push_back("u" + std::to_string(i));
  std::shuffle(items.begin(), items.end(), rng);
  const int len = std::uniform_int_distribution<int>(0, std::min(max_len, pool))(rng);
  items.resize(static_cast<std::size_t>(len));
  return items;
}

namespace {

std::vector<bool> BannerStates(std::mt19937_64& rng, int steps) {
  std::bernoulli_distribution coin(0.5);
  while (true) {
    std::vector<bool> states(static_cast<std::size_t>(steps));
    for (auto&& s : states) s = coin(rng);
    const auto on = std::count(states.begin(), states.end(), true);
    if (on > 0 && on < steps) return states;
  }
}

}  // namespace

BannerTimeline RandomTimeline(std::mt19937_64& rng, int max_steps, int max_urls) {
  const int steps = std::uniform_int_distribution<int>(2, max_steps)(rng);
  const int pool = std::uniform_int_distribution<int>(1, max_urls)(rng);
  const auto states = BannerStates(rng, steps);
  BannerTimeline t;
  t.query_id = "random";
  for (int i = 0; i < steps; ++i) {
    auto list = RandomRankedList(rng, pool, pool);
    (states[static_cast<std::size_t>(i)] ? t.bannered : t.unbannered).push_back(std::move(list));
  }
  return t;
}

BannerTimeline PlantedTimeline(std::mt19937_64& rng, std::string* planted) {
  constexpr int kPool = 6;
  const int steps = std::uniform_int_distribution<int>(2, 8)(rng);
  const auto states = BannerStates(rng, steps);
  const int trigger = std::uniform_int_distribution<int>(0, kPool - 1)(rng);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<bool>> presence(kPool);
  for (int u = 0; u < kPool; ++u) {
    if (u == trigger) {
      presence[u] = states;
      continue;
    }
    do {
      presence[u].assign(static_cast<std::size_t>(steps), false);
      for (auto&& p : presence[u]) p = coin(rng);
    } while (presence[u] == states);
  }
  BannerTimeline t;
  t.query_id = "planted";
  for (int i = 0; i < steps; ++i) {
    std::vector<std::string> list;
    for (int u = 0; u < kPool; ++u) {
      if (presence[u][static_cast<std::size_t>(i)]) list.push_back("u" + std::to_string(u));
    }
    std::shuffle(list.begin(), list.end(), rng);
    (states[static_cast<std::size_t>(i)] ? t.bannered : t.unbannered).push_back(std::move(list));
  }
  *planted = "u" + std::to_string(trigger);
  return t;
}

std::vector<voidscope::RboMatrix> ChurnCorpus(std::mt19937_64& rng, double rate, int queries,
                                              int steps) {
  std::vector<voidscope::RboMatrix> out;
  std::bernoulli_distribution replace(rate);
  for (int q = 0; q < queries; ++q) {
    int fresh = 0;
    const std::string prefix = "q" + std::to_string(q) + "/";
    std::vector<std::string> list;
    for (int i = 0; i < 10; ++i) list.push_back(prefix + std::to_string(fresh++));
    std::vector<voidscope::ObservedList> observed;
    for (int s = 0; s < steps; ++s) {
      if (s > 0) {
        for (auto& url : list) {
          if (replace(rng)) url = prefix + std::to_string(fresh++);
        }
      }
      observed.push_back({s, list});
    }
    out.push_back(voidscope::BuildRboMatrix(prefix, std::move(observed)));
  }
  return out;
}

SparseLogitData MakeSparseLogitData(std::uint64_t seed, int n) {
  SparseLogitData d;
  d.intercept = -0.3;
  d.weights = {2.0, -2.0, 0.0, 1.5};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row;
    double z = d.intercept;
    for (double w : d.weights) {
      row.push_back(normal(rng));
      z += w * row.back();
    }
    d.y.push_back(unit(rng) < voidscope::Sigmoid(z) ? 1 : 0);
    d.x.push_back(std::move(row));
  }
  return d;
}

std::vector<BannerCase> LoadBannerCases() {
  const auto rows = voidscope::text::ParseCsv(
      voidscope::ReadTextFile(FixtureDir() / "banners" / "expected.csv"));
  std::vector<BannerCase> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() < 2) continue;
    auto type = voidscope::BannerTypeFromName(rows[i][1]);
    if (!type) throw std::runtime_error("bad banner type in expected.csv: " + rows[i][1]);
    out.push_back({rows[i][0], *type});
  }
  return out;
}

std::vector<voidscope::VoidLabel> LabelsWithCounts(
    const std::string& wave, std::int64_t total,
    const std::map<BannerType, std::int64_t>& counts) {
  std::vector<voidscope::VoidLabel> out;
  out.reserve(static_cast<std::size_t>(total));
  for (const auto& [type, n] : counts) {
    for (std::int64_t i = 0; i < n; ++i) {
      voidscope::VoidLabel l;
      l.wave_id = wave;
      l.banner_type = type;
      l.by_banner = type == BannerType::kLowQuality;
      out.push_back(std::move(l));
    }
  }
  while (static_cast<std::int64_t>(out.size()) < total) {
    voidscope::VoidLabel l;
    l.wave_id = wave;
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<PrintedRow> PrintedBannerTable() {
  return {
      {"No banner", {{1423474, "98.997"}, {1424269, "99.052"}, {1419295, "98.706"}}},
      {"Any banner", {{14424, "1.0031"}, {13629, "0.9478"}, {18603, "1.2938"}}},
      {"Low-relevance (all)", {{14121, "0.9821"}, {13406, "0.9323"}, {18593, "1.2931"}}},
      {"Low-relevance (not many great matches)",
       {{14062, "0.9780"}, {13348, "0.9283"}, {12468, "0.8671"}}},
      {"Low-relevance (not any great matches)",
       {{59, "0.0041"}, {58, "0.0040"}, {44, "0.0031"}}},
      {"Low-relevance (no matches)", {{0, ""}, {0, ""}, {6081, "0.4229"}}},
      {"Low-quality", {{301, "0.021"}, {221, "0.0154"}, {0, ""}}},
      {"Rapidly-changing", {{2, "0.0001"}, {2, "0.0001"}, {10, "0.0007"}}},
  };
}

}  // namespace testsupport
