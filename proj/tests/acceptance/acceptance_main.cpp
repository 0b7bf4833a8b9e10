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

// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles/dependency_oracle.hpp"
#include "oracles/logit_oracle.hpp"
#include "oracles/rbo_oracle.hpp"
#include "oracles/test_support.hpp"
#include "voidscope/io.hpp"
#include "voidscope/pipeline.hpp"
#include "voidscope/regression.hpp"
#include "voidscope/serp.hpp"
#include "voidscope/stability.hpp"
#include "voidscope/voids.hpp"

namespace {

namespace fs = std::filesystem;
using namespace voidscope;

struct Result {
  bool pass = true;
  std::string detail;

  void Fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

Result BannerCorpus() {
  Result r;
  const auto cases = testsupport::LoadBannerCases();
  std::vector<std::string> pages;
  for (const auto& c : cases) pages.push_back(ReadTextFile(testsupport::FixtureDir() / "banners" / c.file));
  std::set<BannerType> covered;
  const auto t0 = std::chrono::steady_clock::now();
  int correct = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const BannerType got = ParseSerp(pages[i]).banner.banner_type;
    if (got == cases[i].expected) {
      ++correct;
    } else {
      r.Fail(cases[i].file + " classified as " + std::string(BannerTypeName(got)));
    }
    covered.insert(cases[i].expected);
  }
  const double secs = Seconds(t0);
  for (BannerType t : {BannerType::kNone, BannerType::kLowQuality, BannerType::kLowRelevanceMany,
                       BannerType::kLowRelevanceAny, BannerType::kLowRelevanceNoMatches,
                       BannerType::kRapidlyChanging}) {
    if (!covered.count(t)) r.Fail("corpus lacks " + std::string(BannerTypeName(t)));
  }
  if (secs >= 1.0) r.Fail(Fmt("took %.3fs", secs));
  if (r.pass) {
    r.detail = std::to_string(correct) + "/" + std::to_string(cases.size()) + " pages, " +
               Fmt("%.3fs", secs);
  }
  return r;
}

Result RboOracle() {
  Result r;
  std::mt19937_64 rng(20231017);
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs;
  for (int i = 0; i < 1000; ++i) {
    auto s = testsupport::RandomRankedList(rng, 20, 30);
    auto u = testsupport::RandomRankedList(rng, 20, 30);
    pairs.emplace_back(std::move(s), std::move(u));
  }
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (const auto& [s, u] : pairs) {
    const double a = Rbo(s, u);
    worst = std::max(worst, std::abs(a - oracle::BruteForceRbo(s, u)));
    if (a != Rbo(u, s)) r.Fail("asymmetric pair");
  }
  const double secs = Seconds(t0);
  if (worst > 1e-12) r.Fail(Fmt("max deviation %.3g", worst));
  if (secs >= 5.0) r.Fail(Fmt("took %.3fs", secs));
  if (r.pass) r.detail = "1000 pairs, max deviation " + Fmt("%.3g", worst) + Fmt(", %.3fs", secs);
  return r;
}

Result RboKIdentity() {
  Result r;
  std::mt19937_64 rng(7);
  for (int c = 0; c < 100 && r.pass; ++c) {
    std::vector<RboMatrix> corpus;
    const int queries = 1 + static_cast<int>(rng() % 20);
    for (int q = 0; q < queries; ++q) {
      const int steps = 3 + static_cast<int>(rng() % 10);
      std::vector<ObservedList> observed;
      for (int s = 0; s < steps; ++s) {
        observed.push_back({s, testsupport::RandomRankedList(rng, 10, 15)});
      }
      corpus.push_back(BuildRboMatrix("q" + std::to_string(q), std::move(observed)));
    }
    std::size_t shortest = corpus[0].timesteps();
    for (const auto& m : corpus) shortest = std::min(shortest, m.timesteps());
    for (int k = 1; k < static_cast<int>(shortest); ++k) {
      double sum = 0;
      for (const auto& m : corpus) sum += WindowedRbo(m, k);
      const double mean = sum / static_cast<double>(corpus.size());
      if (RboK(corpus, k) != mean) r.Fail("corpus " + std::to_string(c) + " K=" + std::to_string(k));
    }
  }
  if (r.pass) r.detail = "100 corpora, bitwise equal";
  return r;
}

Result ChurnOrdering() {
  Result r;
  std::map<double, std::map<int, double>> curves;
  for (double rate : {0.1, 0.3, 0.5}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(rate * 1000));
    const auto corpus = testsupport::ChurnCorpus(rng, rate, 50, 20);
    for (int k = 1; k <= 12; ++k) curves[rate][k] = RboK(corpus, k);
  }
  for (int k = 1; k <= 12; ++k) {
    if (!(curves[0.1][k] > curves[0.3][k] && curves[0.3][k] > curves[0.5][k])) {
      r.Fail("not strictly ordered at K=" + std::to_string(k));
    }
    for (double rate : {0.1, 0.3, 0.5}) {
      if (k > 1 && curves[rate][k] > curves[rate][k - 1]) {
        r.Fail(Fmt("rate %.1f increases", rate) + " at K=" + std::to_string(k));
      }
    }
  }
  if (r.pass) {
    r.detail = "K=1: " + Fmt("%.4f", curves[0.1][1]) + Fmt(" > %.4f", curves[0.3][1]) +
               Fmt(" > %.4f", curves[0.5][1]) + "; K=12: " + Fmt("%.4f", curves[0.1][12]) +
               Fmt(" > %.4f", curves[0.3][12]) + Fmt(" > %.4f", curves[0.5][12]);
  }
  return r;
}

Result DependencyOracle() {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(42);
  long checks = 0;
  for (int i = 0; i < 10000 && r.pass; ++i) {
    const BannerTimeline t = testsupport::RandomTimeline(rng, 8, 6);
    const std::string where = "timeline " + std::to_string(i);
    if (SingleUrlExplanation(t) != oracle::EnumerateSingles(t)) r.Fail(where + " Q1");
    if (PairExplanation(t) != oracle::EnumeratePairs(t, false)) r.Fail(where + " Q2 joint");
    if (PairExplanation(t, PairMode::kIndependent) != oracle::EnumeratePairs(t, true)) {
      r.Fail(where + " Q2 independent");
    }
    for (int c = 1; c <= 7; ++c) {
      if (RankCutoffExplanation(t, c) != oracle::EnumerateCutoffPairs(t, c)) {
        r.Fail(where + " Q3 c=" + std::to_string(c));
      }
    }
    checks += 10;
  }
  int recovered = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string planted;
    const BannerTimeline t = testsupport::PlantedTimeline(rng, &planted);
    if (SingleUrlExplanation(t) == std::set<std::string>{planted}) ++recovered;
  }
  if (recovered != 1000) r.Fail("planted trigger recovered in " + std::to_string(recovered) + "/1000");
  const double secs = Seconds(t0);
  if (secs >= 60.0) r.Fail(Fmt("took %.1fs", secs));
  if (r.pass) {
    r.detail = "10000 timelines (" + std::to_string(checks) + " comparisons), 1000/1000 planted, " +
               Fmt("%.2fs", secs);
  }
  return r;
}

Result L1Logit() {
  Result r;
  const auto data = testsupport::MakeSparseLogitData(2023, 200);
  const LogitModel m = FitL1Logit(data.x, data.y, {.alpha = 0.1});
  if (m.coefficients[2] != 0.0) r.Fail(Fmt("planted zero is %.3g", m.coefficients[2]));
  for (std::size_t j = 0; j < data.weights.size(); ++j) {
    if (data.weights[j] == 0) continue;
    if (m.coefficients[j] == 0 || (m.coefficients[j] > 0) != (data.weights[j] > 0)) {
      r.Fail("wrong sign for feature " + std::to_string(j));
    }
  }
  const auto cd = oracle::CoordinateDescentLogit(data.x, data.y, 0.1);
  double cd_gap = std::abs(m.intercept - cd.intercept);
  for (std::size_t j = 0; j < cd.coefficients.size(); ++j) {
    cd_gap = std::max(cd_gap, std::abs(m.coefficients[j] - cd.coefficients[j]));
  }
  if (cd_gap > 1e-4) r.Fail(Fmt("coordinate descent gap %.3g", cd_gap));
  const LogitModel plain = FitL1Logit(data.x, data.y, {.alpha = 0});
  const auto newton = oracle::NewtonLogit(data.x, data.y);
  double newton_gap = std::abs(plain.intercept - newton.intercept);
  for (std::size_t j = 0; j < newton.coefficients.size(); ++j) {
    newton_gap = std::max(newton_gap, std::abs(plain.coefficients[j] - newton.coefficients[j]));
  }
  if (newton_gap > 1e-6) r.Fail(Fmt("Newton gap %.3g", newton_gap));
  if (r.pass) {
    r.detail = "zero exact, signs ok, CD gap " + Fmt("%.2g", cd_gap) + ", Newton gap " +
               Fmt("%.2g", newton_gap);
  }
  return r;
}

// Printed percentages carry 3 or 4 decimals; a value matches when it lies
// within half a unit of the last printed digit.
bool MatchesPrinted(double pct, const std::string& printed) {
  const auto dot = printed.find('.');
  const int decimals = dot == std::string::npos ? 0 : static_cast<int>(printed.size() - dot - 1);
  return std::abs(pct - std::stod(printed)) <= 0.5 * std::pow(10.0, -decimals) + 1e-12;
}

Result VoidArithmetic() {
  Result r;
  const Extrapolation e = Extrapolate({5e9, 0.0077, 0.003});
  if (e.daily_voids != 38.5e6) r.Fail(Fmt("daily voids %.17g", e.daily_voids));
  if (e.bannered_daily_voids != 115.5e3) {
    r.Fail(Fmt("bannered daily voids %.17g", e.bannered_daily_voids));
  }

  const auto rows = testsupport::PrintedBannerTable();
  const std::map<std::string, BannerType> type_rows = {
      {"Low-relevance (not many great matches)", BannerType::kLowRelevanceMany},
      {"Low-relevance (not any great matches)", BannerType::kLowRelevanceAny},
      {"Low-relevance (no matches)", BannerType::kLowRelevanceNoMatches},
      {"Low-quality", BannerType::kLowQuality},
      {"Rapidly-changing", BannerType::kRapidlyChanging},
  };
  int cells = 0;
  for (std::size_t wave = 0; wave < 3; ++wave) {
    std::map<BannerType, std::int64_t> counts;
    for (const auto& row : rows) {
      if (type_rows.count(row.label)) counts[type_rows.at(row.label)] = row.cells[wave].count;
    }
    const std::string id = "crawl-" + std::to_string(wave + 1);
    PrevalenceReport report;
    {
      const auto labels = testsupport::LabelsWithCounts(id, testsupport::kCrawlTotal, counts);
      report = BuildPrevalenceReport(labels);
    }
    const WaveStats& w = report.waves.at(0);
    const std::string table = FormatBannerTable(report);
    for (const auto& row : rows) {
      const auto& cell = row.cells[wave];
      std::int64_t count = 0;
      if (row.label == "No banner") {
        count = w.banner_counts.at(BannerType::kNone);
      } else if (row.label == "Any banner") {
        count = w.any_banner;
      } else if (row.label == "Low-relevance (all)") {
        count = w.low_relevance_all;
      } else {
        count = w.banner_counts.at(type_rows.at(row.label));
      }
      const std::string where = id + " " + row.label;
      if (count != cell.count) r.Fail(where + ": count " + std::to_string(count));
      if (cell.percent.empty()) continue;
      const double pct = 100.0 * w.Rate(count);
      if (!MatchesPrinted(pct, cell.percent)) r.Fail(where + ": " + Fmt("%.6f%%", pct));
      // Four-decimal cells must also match the formatted table text.
      if (cell.percent.size() - cell.percent.find('.') - 1 == 4 &&
          table.find("(" + cell.percent + "%)") == std::string::npos) {
        r.Fail(where + ": table lacks " + cell.percent + "%");
      }
      ++cells;
    }
    if (wave == 0 && table.find("14,424 (1.0031%)") == std::string::npos) {
      r.Fail("crawl-1 table lacks 14,424 (1.0031%)");
    }
  }
  if (r.pass) r.detail = "38.5e6 / 115.5e3 exact, " + std::to_string(cells) + " table cells match";
  return r;
}

Result QualityBoundary() {
  Result r;
  if (ClassifyVoidByQuality(0.5) != std::optional<bool>(true)) r.Fail("0.5 is not a void");
  if (ClassifyVoidByQuality(0.5 + 1e-9) != std::optional<bool>(false)) {
    r.Fail("0.5 + 1e-9 is a void");
  }
  if (r.pass) r.detail = "0.5 void, 0.5+1e-9 not";
  return r;
}

std::map<std::string, std::string> Tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = ReadTextFile(e.path());
  }
  return out;
}

Result EndToEnd() {
  Result r;
  const fs::path a = testsupport::FreshDir("acceptance-a");
  const fs::path b = testsupport::FreshDir("acceptance-b");
  Pipeline(testsupport::FixtureConfig(a)).RunAll();
  Pipeline(testsupport::FixtureConfig(b)).RunAll();
  const auto ta = Tree(a);
  const auto tb = Tree(b);
  if (ta != tb) {
    for (const auto& [name, content] : ta) {
      if (!tb.count(name) || tb.at(name) != content) {
        r.Fail("runs differ at " + name);
        break;
      }
    }
    if (r.pass) r.Fail("runs differ in file set");
  }
  const std::string golden = testsupport::CompareWithGolden(a);
  if (!golden.empty()) r.Fail("golden mismatch: " + golden.substr(0, golden.find('\n')));
  if (r.pass) {
    r.detail = std::to_string(ta.size()) + " files identical, " +
               std::to_string(testsupport::GoldenArtifacts().size()) + " golden artifacts match";
  }
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> checks = {
      {"banner-classification", BannerCorpus},
      {"rbo-oracle-equivalence", RboOracle},
      {"rbo-k-mean-identity", RboKIdentity},
      {"churn-ordering", ChurnOrdering},
      {"dependency-oracle-equivalence", DependencyOracle},
      {"l1-logit", L1Logit},
      {"void-arithmetic", VoidArithmetic},
      {"quality-threshold-boundary", QualityBoundary},
      {"end-to-end-determinism", EndToEnd},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r.Fail(std::string("exception: ") + e.what());
    }
    std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << std::endl;
    failures += !r.pass;
  }
  return failures == 0 ? 0 : 1;
}
