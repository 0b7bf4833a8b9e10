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

#include "voidscope/regression.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>

#include "voidscope/error.hpp"

namespace voidscope {

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

constexpr double kZ975 = 1.959963984540054;

double Dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double NormInf(const Vec& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Solves A x = b for symmetric positive definite A by Cholesky; falls back
// to Gaussian elimination with partial pivoting. Returns false if singular.
bool Solve(Mat a, Vec b, Vec& x) {
  const std::size_t n = b.size();
  Mat l(n, Vec(n, 0.0));
  bool spd = true;
  for (std::size_t j = 0; j < n && spd; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (!(d > 1e-300)) {
      spd = false;
      break;
    }
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  x.assign(n, 0.0);
  if (spd) {
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * z[k];
      z[i] = s / l[i][i];
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = z[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= l[k][i] * x[k];
      x[i] = s / l[i][i];
    }
    return true;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-14) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return true;
}

bool Invert(const Mat& a, Mat& inv) {
  const std::size_t n = a.size();
  inv.assign(n, Vec(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    Vec e(n, 0.0);
    e[j] = 1.0;
    Vec col;
    if (!Solve(a, e, col)) return false;
    for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return true;
}

// theta[0] is the intercept; theta[1..p] the coefficients.
class Problem {
 public:
  Problem(const Mat& x, const std::vector<int>& y, double alpha)
      : x_(x), y_(y), alpha_(alpha), n_(static_cast<double>(x.size())) {}

  std::size_t dim() const { return x_.empty() ? 1 : x_[0].size() + 1; }

  double Linear(const Vec& theta, std::size_t i) const {
    double eta = theta[0];
    for (std::size_t j = 0; j < x_[i].size(); ++j) eta += theta[j + 1] * x_[i][j];
    return eta;
  }

  // Unnormalized log-likelihood.
  double LogLik(const Vec& theta) const {
    double ll = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double eta = Linear(theta, i);
      ll += y_[i] * eta - Softplus(eta);
    }
    return ll;
  }

  // Mean negative log-likelihood and its gradient.
  double Smooth(const Vec& theta, Vec* grad) const {
    double loss = 0;
    if (grad) grad->assign(dim(), 0.0);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double eta = Linear(theta, i);
      loss += Softplus(eta) - y_[i] * eta;
      if (grad) {
        const double r = Sigmoid(eta) - y_[i];
        (*grad)[0] += r;
        for (std::size_t j = 0; j < x_[i].size(); ++j) (*grad)[j + 1] += r * x_[i][j];
      }
    }
    if (grad) {
      for (double& g : *grad) g /= n_;
    }
    return loss / n_;
  }

  double Penalty(const Vec& theta) const {
    double s = 0;
    for (std::size_t j = 1; j < theta.size(); ++j) s += std::abs(theta[j]);
    return alpha_ * s;
  }

  double Objective(const Vec& theta, Vec* grad) const {
    return Smooth(theta, grad) + Penalty(theta);
  }

  Vec PseudoGradient(const Vec& theta, const Vec& g) const {
    Vec pg(g.size());
    pg[0] = g[0];
    for (std::size_t j = 1; j < g.size(); ++j) {
      if (theta[j] > 0) {
        pg[j] = g[j] + alpha_;
      } else if (theta[j] < 0) {
        pg[j] = g[j] - alpha_;
      } else if (g[j] + alpha_ < 0) {
        pg[j] = g[j] + alpha_;
      } else if (g[j] - alpha_ > 0) {
        pg[j] = g[j] - alpha_;
      } else {
        pg[j] = 0;
      }
    }
    return pg;
  }

  // Mean Hessian of the smooth part restricted to `free` indices.
  Mat Hessian(const Vec& theta, const std::vector<std::size_t>& free) const {
    const std::size_t m = free.size();
    Mat h(m, Vec(m, 0.0));
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double p = Sigmoid(Linear(theta, i));
      const double w = p * (1 - p);
      for (std::size_t a = 0; a < m; ++a) {
        const double xa = free[a] == 0 ? 1.0 : x_[i][free[a] - 1];
        for (std::size_t b = a; b < m; ++b) {
          const double xb = free[b] == 0 ? 1.0 : x_[i][free[b] - 1];
          h[a][b] += w * xa * xb;
        }
      }
    }
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) {
        h[a][b] /= n_;
        h[b][a] = h[a][b];
      }
    }
    return h;
  }

  double alpha() const { return alpha_; }

 private:
  const Mat& x_;
  const std::vector<int>& y_;
  double alpha_;
  double n_;
};

struct Memory {
  std::deque<Vec> s;
  std::deque<Vec> y;
  static constexpr std::size_t kSize = 10;

  void Push(Vec sk, Vec yk) {
    if (Dot(sk, yk) <= 1e-16) return;
    s.push_back(std::move(sk));
    y.push_back(std::move(yk));
    if (s.size() > kSize) {
      s.pop_front();
      y.pop_front();
    }
  }

  Vec Apply(const Vec& q_in) const {
    Vec q = q_in;
    const std::size_t m = s.size();
    Vec a(m);
    for (std::size_t i = m; i-- > 0;) {
      a[i] = Dot(s[i], q) / Dot(s[i], y[i]);
      for (std::size_t k = 0; k < q.size(); ++k) q[k] -= a[i] * y[i][k];
    }
    if (m > 0) {
      const double gamma = Dot(s.back(), y.back()) / Dot(y.back(), y.back());
      for (double& v : q) v *= gamma;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double b = Dot(y[i], q) / Dot(s[i], y[i]);
      for (std::size_t k = 0; k < q.size(); ++k) q[k] += s[i][k] * (a[i] - b);
    }
    return q;
  }
};

double Sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

struct State {
  Vec theta;
  Vec grad;  // smooth gradient
  double f = 0;
};

// Newton step on the intercept and the nonzero coefficients, keeping the
// zero pattern and signs. Only valid once every zero coefficient satisfies
// its optimality condition.
bool NewtonStep(const Problem& prob, State& st) {
  std::vector<std::size_t> free = {0};
  for (std::size_t j = 1; j < st.theta.size(); ++j) {
    if (st.theta[j] != 0) {
      free.push_back(j);
    } else if (std::abs(st.grad[j]) > prob.alpha()) {
      return false;
    }
  }
  Vec rhs(free.size());
  for (std::size_t a = 0; a < free.size(); ++a) {
    const std::size_t j = free[a];
    rhs[a] = -(st.grad[j] + (j == 0 ? 0.0 : prob.alpha() * Sign(st.theta[j])));
  }
  Vec step;
  if (!Solve(prob.Hessian(st.theta, free), rhs, step)) return false;
  const double slope = -Dot(rhs, step);
  if (!(slope < 0)) return false;
  for (double t = 1.0; t > 1e-10; t *= 0.5) {
    Vec cand = st.theta;
    for (std::size_t a = 0; a < free.size(); ++a) {
      const std::size_t j = free[a];
      cand[j] = st.theta[j] + t * step[a];
      if (j != 0 && Sign(cand[j]) != Sign(st.theta[j])) cand[j] = 0;
    }
    Vec g;
    const double f = prob.Objective(cand, &g);
    if (f <= st.f + 1e-4 * t * slope) {
      st.theta = std::move(cand);
      st.grad = std::move(g);
      st.f = f;
      return true;
    }
  }
  return false;
}

// One orthant-wise L-BFGS iteration. Returns false when no descent step is
// found.
bool OwlqnStep(const Problem& prob, State& st, Memory& mem, const Vec& pg, bool first) {
  Vec d = mem.Apply(pg);
  for (double& v : d) v = -v;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d[j] * pg[j] >= 0) d[j] = 0;
  }
  if (Dot(d, pg) >= 0) {
    mem = Memory{};
    d = pg;
    for (double& v : d) v = -v;
  }
  Vec orthant(st.theta.size());
  for (std::size_t j = 0; j < orthant.size(); ++j) {
    orthant[j] = st.theta[j] != 0 ? Sign(st.theta[j]) : Sign(-pg[j]);
  }
  double t = first ? 1.0 / std::max(1.0, std::sqrt(Dot(pg, pg))) : 1.0;
  for (int tries = 0; tries < 80; ++tries, t *= 0.5) {
    Vec cand(st.theta.size());
    for (std::size_t j = 0; j < cand.size(); ++j) {
      cand[j] = st.theta[j] + t * d[j];
      if (j > 0 && Sign(cand[j]) != orthant[j]) cand[j] = 0;
    }
    Vec delta(cand.size());
    for (std::size_t j = 0; j < cand.size(); ++j) delta[j] = cand[j] - st.theta[j];
    Vec g;
    const double f = prob.Objective(cand, &g);
    if (f <= st.f + 1e-4 * Dot(pg, delta) && f <= st.f) {
      Vec yk(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) yk[j] = g[j] - st.grad[j];
      mem.Push(std::move(delta), std::move(yk));
      st.theta = std::move(cand);
      st.grad = std::move(g);
      st.f = f;
      return true;
    }
  }
  return false;
}

void CheckInputs(const Mat& x, const std::vector<int>& y) {
  if (x.empty() || x.size() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "X and y must have the same non-zero length");
  }
  const std::size_t p = x[0].size();
  for (const auto& row : x) {
    if (row.size() != p) throw Error(ErrorCode::kDimensionMismatch, "ragged feature matrix");
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite feature");
    }
  }
  bool zero = false;
  bool one = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    zero |= v == 0;
    one |= v == 1;
  }
  if (!(zero && one)) throw Error(ErrorCode::kSingleClass, "labels contain a single class");
}

constexpr std::array<std::string_view, 2> kTargetNames = {"low_quality", "low_relevance"};

}  // namespace

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::string_view LogitTargetName(LogitTarget target) {
  return kTargetNames[static_cast<int>(target)];
}

std::optional<LogitTarget> LogitTargetFromName(std::string_view name) {
  for (std::size_t i = 0; i < kTargetNames.size(); ++i) {
    if (kTargetNames[i] == name) return static_cast<LogitTarget>(i);
  }
  return std::nullopt;
}

std::vector<std::string> FeatureNames(LogitTarget target) {
  std::vector<std::string> names = {"char_count_log10", "conspiracy_flag", "political_flag"};
  if (target == LogitTarget::kLowRelevance) names.push_back("operator_flag");
  for (const char* n : {"avg_low_quality_score", "rank_weighted_partisanship",
                        "estimated_total_results_log10", "avg_domain_traffic_log10",
                        "news_domain_count", "unique_domain_count"}) {
    names.push_back(n);
  }
  return names;
}

std::optional<FeatureRow> AssembleFeatures(const Query& query, const SerpAggregate& agg,
                                           LogitTarget target, bool label,
                                           std::string* drop_reason) {
  auto missing = [&](const char* field) -> std::optional<FeatureRow> {
    if (drop_reason) *drop_reason = field;
    return std::nullopt;
  };
  if (!agg.avg_domain_quality) return missing("avg_domain_quality");
  if (!agg.rank_weighted_partisanship) return missing("rank_weighted_partisanship");
  if (!agg.estimated_total_results_log10) return missing("estimated_total_results_log10");
  if (!agg.avg_domain_traffic_log10) return missing("avg_domain_traffic_log10");

  FeatureRow row;
  row.y = label ? 1 : 0;
  row.x = {std::log10(1.0 + query.char_count), query.topics.conspiracy ? 1.0 : 0.0,
           query.topics.political ? 1.0 : 0.0};
  if (target == LogitTarget::kLowRelevance) {
    row.x.push_back(query.operators.has_any() ? 1.0 : 0.0);
  }
  row.x.push_back(1.0 - *agg.avg_domain_quality);
  row.x.push_back(*agg.rank_weighted_partisanship);
  row.x.push_back(*agg.estimated_total_results_log10);
  row.x.push_back(*agg.avg_domain_traffic_log10);
  row.x.push_back(agg.news_domain_count);
  row.x.push_back(agg.unique_domain_count);
  return row;
}

LogitModel FitL1Logit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      const LogitOptions& options, std::vector<std::string> feature_names) {
  CheckInputs(x, y);
  if (!(options.alpha >= 0) || !std::isfinite(options.alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be finite and >= 0");
  }
  const std::size_t n = x.size();
  const std::size_t p = x[0].size();
  if (feature_names.empty()) {
    for (std::size_t j = 0; j < p; ++j) feature_names.push_back("x" + std::to_string(j + 1));
  }
  if (feature_names.size() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "feature_names does not match X width");
  }

  Vec mean(p, 0.0);
  Vec scale(p, 1.0);
  Mat z = x;
  if (options.standardize) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0;
      for (const auto& row : x) s += row[j];
      mean[j] = s / static_cast<double>(n);
      double ss = 0;
      for (const auto& row : x) ss += (row[j] - mean[j]) * (row[j] - mean[j]);
      const double sd = std::sqrt(ss / static_cast<double>(n));
      scale[j] = sd > 0 ? sd : 1.0;
      for (auto& row : z) row[j] = (row[j] - mean[j]) / scale[j];
    }
  }

  const Problem prob(z, y, options.alpha);
  const double ybar =
      static_cast<double>(std::accumulate(y.begin(), y.end(), 0)) / static_cast<double>(n);
  State st;
  st.theta.assign(p + 1, 0.0);
  st.theta[0] = std::log(ybar / (1 - ybar));
  st.f = prob.Objective(st.theta, &st.grad);

  LogitModel model;
  model.feature_names = std::move(feature_names);
  model.alpha = options.alpha;
  model.standardized = options.standardize;
  model.n = n;
  model.objective_trace.push_back(st.f);

  Memory mem;
  int iter = 0;
  bool first = true;
  for (; iter < options.max_iterations; ++iter) {
    const Vec pg = prob.PseudoGradient(st.theta, st.grad);
    if (NormInf(pg) <= options.tolerance) {
      model.converged = true;
      break;
    }
    const Vec before = st.theta;
    const Vec grad_before = st.grad;
    bool moved = false;
    if (NormInf(pg) < 1e-4) {
      moved = NewtonStep(prob, st);
      if (moved) {
        Vec s(before.size());
        Vec yk(before.size());
        for (std::size_t j = 0; j < s.size(); ++j) {
          s[j] = st.theta[j] - before[j];
          yk[j] = st.grad[j] - grad_before[j];
        }
        mem.Push(std::move(s), std::move(yk));
      }
    }
    if (!moved) moved = OwlqnStep(prob, st, mem, pg, first);
    if (!moved) {
      // Retry once from a cleared memory, then give up.
      mem = Memory{};
      if (!OwlqnStep(prob, st, mem, pg, true)) {
        model.converged = NormInf(pg) <= options.tolerance;
        break;
      }
    }
    first = false;
    model.objective_trace.push_back(st.f);
  }
  if (!model.converged) {
    model.converged = NormInf(prob.PseudoGradient(st.theta, st.grad)) <= options.tolerance;
  }
  model.iterations = iter;

  model.coefficients.resize(p);
  model.intercept = st.theta[0];
  for (std::size_t j = 0; j < p; ++j) {
    model.coefficients[j] = st.theta[j + 1] / scale[j];
    model.intercept -= st.theta[j + 1] * mean[j] / scale[j];
  }

  const Problem original(x, y, 0.0);
  Vec theta(p + 1);
  theta[0] = model.intercept;
  for (std::size_t j = 0; j < p; ++j) theta[j + 1] = model.coefficients[j];
  model.log_likelihood = original.LogLik(theta);
  model.null_log_likelihood = static_cast<double>(n) * (ybar * std::log(ybar) +
                                                        (1 - ybar) * std::log(1 - ybar));
  if (model.converged) {
    model.pseudo_r2 =
        std::clamp(1.0 - model.log_likelihood / model.null_log_likelihood, 0.0, 1.0);
  }

  if (options.alpha == 0 && model.converged) {
    std::vector<std::size_t> all(p + 1);
    std::iota(all.begin(), all.end(), 0);
    Mat info = original.Hessian(theta, all);
    for (auto& row : info) {
      for (double& v : row) v *= static_cast<double>(n);
    }
    Mat cov;
    if (Invert(info, cov)) {
      std::vector<std::pair<double, double>> ci;
      for (std::size_t j = 0; j <= p; ++j) {
        const double se = std::sqrt(std::max(cov[j][j], 0.0));
        ci.emplace_back(theta[j] - kZ975 * se, theta[j] + kZ975 * se);
      }
      model.conf_int = std::move(ci);
    }
  }
  return model;
}

std::vector<double> Predict(const LogitModel& model,
                            const std::vector<std::vector<double>>& x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x) {
    if (row.size() != model.coefficients.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "row has " + std::to_string(row.size()) + " features, model expects " +
                      std::to_string(model.coefficients.size()));
    }
    double eta = model.intercept;
    for (std::size_t j = 0; j < row.size(); ++j) eta += model.coefficients[j] * row[j];
    out.push_back(Sigmoid(eta));
  }
  return out;
}

}  // namespace voidscope
