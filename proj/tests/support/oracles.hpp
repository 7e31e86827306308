// Copyright 2026 The caplens Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reference computations used to check the library. They share no code
// with it: slow, simple and in extended precision where that helps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace caplens::testing {

// Two-pass population variance over every entry.
inline long double two_pass_variance(std::span<const double> values) {
  long double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<long double>(values.size());
  long double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<long double>(values.size());
}

// cov(x, y) / (sd(x) sd(y)) straight from the definition.
inline long double pearson_by_definition(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<long double>(xs.size());
  long double mx = 0;
  long double my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0;
  long double sxx = 0;
  long double syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double rbf_by_definition(const double* a, const double* b, std::size_t dim, double gamma) {
  long double d2 = 0;
  for (std::size_t k = 0; k < dim; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  return static_cast<double>(std::exp(-static_cast<long double>(gamma) * d2));
}

struct DualSolution {
  std::vector<double> alpha;
  double objective = 0.0;  // 0.5 a'Qa - sum a
  std::size_t iterations = 0;
};

// Projection onto {0 <= a <= C, y'a = 0}: a_i = clip(v_i - lambda y_i),
// with lambda found by bisection (the constraint residual is monotone).
inline std::vector<double> project_box_hyperplane(std::span<const double> v,
                                                  std::span<const int> y, double C) {
  auto residual = [&](double lambda) {
    long double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += y[i] * std::clamp(v[i] - lambda * y[i], 0.0, C);
    }
    return s;
  };
  double bound = C;
  for (double x : v) bound = std::max(bound, std::abs(x) + C);
  double lo = -bound;
  double hi = bound;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval exhausted in double precision
    if (residual(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double lambda = 0.5 * (lo + hi);
  std::vector<double> a(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::clamp(v[i] - lambda * y[i], 0.0, C);
  return a;
}

// FISTA with adaptive restart on min 0.5 a'Qa - 1'a over the feasible
// set, Q_ij = y_i y_j K(x_i, x_j).
inline DualSolution solve_dual_projected_gradient(std::span<const double> X, std::size_t dim,
                                                  std::span<const int> y, double gamma, double C,
                                                  std::size_t max_iter = 200000) {
  const std::size_t n = y.size();
  std::vector<double> Q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Q[i * n + j] = y[i] * y[j] * rbf_by_definition(&X[i * dim], &X[j * dim], dim, gamma);
    }
  }
  // Gershgorin bound on the largest eigenvalue.
  double L = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(Q[i * n + j]);
    L = std::max(L, row);
  }
  auto objective = [&](const std::vector<double>& a) {
    long double f = 0;
    for (std::size_t i = 0; i < n; ++i) {
      long double qa = 0;
      for (std::size_t j = 0; j < n; ++j) qa += Q[i * n + j] * a[j];
      f += 0.5L * a[i] * qa - a[i];
    }
    return static_cast<double>(f);
  };
  auto gradient = [&](const std::vector<double>& a) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      long double s = -1;
      for (std::size_t j = 0; j < n; ++j) s += Q[i * n + j] * a[j];
      g[i] = static_cast<double>(s);
    }
    return g;
  };

  std::vector<double> a(n, 0.0);
  std::vector<double> z = a;
  double t = 1.0;
  double f = objective(a);
  DualSolution sol;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const auto g = gradient(z);
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) step[i] = z[i] - g[i] / L;
    std::vector<double> next = project_box_hyperplane(step, y, C);
    const double f_next = objective(next);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double change = 0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - a[i]));
    if (f_next > f) {
      // Restart the momentum when the objective goes up.
      z = a;
      t = 1.0;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = next[i] + ((t - 1.0) / t_next) * (next[i] - a[i]);
    a = std::move(next);
    f = f_next;
    t = t_next;
    sol.iterations = it + 1;
    if (change < 1e-12) break;
  }
  sol.alpha = a;
  sol.objective = f;
  return sol;
}

}  // namespace caplens::testing
