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

#include "voidscope/voids.hpp"

#include <cmath>
#include <array>
#include <cstdio>
#include <functional>
#include <sstream>

#include "voidscope/error.hpp"
#include "voidscope/text.hpp"

namespace voidscope {

namespace {

constexpr std::array<std::string_view, 3> kDefinitions = {"banner", "quality", "model"};

std::optional<double> Ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string Cell(std::int64_t count, double pct) {
  if (count == 0) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s (%.4f%%)", text::WithThousands(count).c_str(), pct);
  return buf;
}

}  // namespace

std::optional<bool> ClassifyVoidByQuality(std::optional<double> avg_domain_quality,
                                          double threshold, Comparator comparator) {
  if (!avg_domain_quality) return std::nullopt;
  return comparator == Comparator::kLessOrEqual ? *avg_domain_quality <= threshold
                                                : *avg_domain_quality < threshold;
}

std::optional<bool> ClassifyVoidByQuality(const SerpAggregate& agg, double threshold,
                                          Comparator comparator) {
  return ClassifyVoidByQuality(agg.avg_domain_quality, threshold, comparator);
}

bool ClassifyVoidByModel(double confidence, double threshold) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "confidence must be in [0,1]");
  }
  return confidence >= threshold;
}

Extrapolation Extrapolate(const ExtrapolationInputs& inputs) {
  Extrapolation e;
  e.inputs = inputs;
  e.daily_voids = inputs.daily_searches * inputs.void_rate;
  e.bannered_daily_voids = e.daily_voids * inputs.banner_rate;
  return e;
}

double WaveStats::Rate(std::int64_t count) const {
  return total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
}

PrevalenceReport BuildPrevalenceReport(std::span<const VoidLabel> labels,
                                       std::optional<ExtrapolationInputs> extrapolation) {
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "no labeled SERPs");
  std::map<std::string, WaveStats> waves;
  for (const VoidLabel& l : labels) {
    WaveStats& w = waves[l.wave_id];
    if (w.total == 0) {
      w.wave_id = l.wave_id;
      for (int t = 0; t <= static_cast<int>(BannerType::kOther); ++t) {
        w.banner_counts[static_cast<BannerType>(t)] = 0;
      }
      for (auto d : kDefinitions) w.definitions[std::string(d)];
    }
    ++w.total;
    ++w.banner_counts[l.banner_type];
    if (l.banner_type != BannerType::kNone) ++w.any_banner;
    if (IsLowRelevance(l.banner_type)) ++w.low_relevance_all;

    const std::optional<bool> verdicts[] = {l.by_banner, l.by_quality, l.by_model};
    for (std::size_t d = 0; d < kDefinitions.size(); ++d) {
      if (!verdicts[d]) continue;
      DefinitionStats& s = w.definitions[std::string(kDefinitions[d])];
      ++s.labeled;
      s.bannered += l.by_banner;
      if (*verdicts[d]) {
        ++s.voids;
        s.bannered_voids += l.by_banner;
      }
    }
  }

  PrevalenceReport report;
  for (auto& [id, w] : waves) {
    for (auto& [name, s] : w.definitions) {
      s.void_rate = s.labeled == 0 ? 0.0
                                   : static_cast<double>(s.voids) / static_cast<double>(s.labeled);
      s.voids_bannered = Ratio(s.bannered_voids, s.voids);
      s.bannered_are_voids = Ratio(s.bannered_voids, s.bannered);
    }
    report.waves.push_back(std::move(w));
  }
  if (extrapolation) report.extrapolation = Extrapolate(*extrapolation);
  return report;
}

std::string FormatBannerTable(const PrevalenceReport& report) {
  struct Row {
    std::string label;
    std::function<std::int64_t(const WaveStats&)> count;
  };
  auto by_type = [](BannerType t) {
    return [t](const WaveStats& w) { return w.banner_counts.at(t); };
  };
  const std::vector<Row> rows = {
      {"No banner", by_type(BannerType::kNone)},
      {"Any banner", [](const WaveStats& w) { return w.any_banner; }},
      {"Low-relevance (all)", [](const WaveStats& w) { return w.low_relevance_all; }},
      {"Low-relevance (not many great matches)", by_type(BannerType::kLowRelevanceMany)},
      {"Low-relevance (not any great matches)", by_type(BannerType::kLowRelevanceAny)},
      {"Low-relevance (no matches)", by_type(BannerType::kLowRelevanceNoMatches)},
      {"Low-quality", by_type(BannerType::kLowQuality)},
      {"Rapidly-changing", by_type(BannerType::kRapidlyChanging)},
      {"Other", by_type(BannerType::kOther)},
  };

  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"Warning Banner Type"};
  for (const auto& w : report.waves) header.push_back(w.wave_id);
  cells.push_back(header);
  for (const Row& row : rows) {
    std::vector<std::string> line = {row.label};
    bool any = false;
    for (const auto& w : report.waves) {
      const std::int64_t c = row.count(w);
      any |= c != 0;
      line.push_back(Cell(c, 100.0 * w.Rate(c)));
    }
    if (row.label == "Other" && !any) continue;
    cells.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      width[i] = std::max(width[i], text::CodePointCount(line[i]));
    }
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      const std::string& c = cells[r][i];
      const std::string pad(width[i] - text::CodePointCount(c), ' ');
      if (i > 0) out << "  ";
      out << (i == 0 ? c + pad : pad + c);
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w;
      out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
  return out.str();
}

std::vector<std::pair<std::string, double>> ParseConfidenceCsv(std::string_view csv) {
  const auto rows = text::ParseCsv(csv);
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "confidence file is empty");
  if (rows[0].size() != 2 || text::TrimAscii(rows[0][0]) != "query_id" ||
      text::TrimAscii(rows[0][1]) != "confidence") {
    throw Error(ErrorCode::kParse, "confidence header must be query_id,confidence");
  }
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::string where = "confidence row " + std::to_string(i + 1);
    if (rows[i].size() != 2) throw Error(ErrorCode::kParse, where + ": expected 2 columns");
    const std::string value(text::TrimAscii(rows[i][1]));
    std::size_t used = 0;
    double c = 0;
    try {
      c = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (value.empty() || used != value.size()) {
      throw Error(ErrorCode::kParse, where + ": not a number");
    }
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::kOutOfRange, where + ": outside [0,1]");
    out.emplace_back(rows[i][0], c);
  }
  return out;
}

}  // namespace voidscope
