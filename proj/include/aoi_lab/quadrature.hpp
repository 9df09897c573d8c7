// Copyright 2026 The aoi-lab Authors
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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace aoi_lab::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

struct Tolerance {
  double absolute = 1e-13;
  double relative = 1e-12;
  std::size_t max_intervals = 4000;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

template <typename F>
Piece Kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  double error = std::abs(kronrod - gauss);
  if (!std::isfinite(kronrod)) error = INFINITY;
  return {a, b, kronrod, error};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod quadrature of f over [a, b]. The interval
// with the largest error estimate is bisected until the summed estimate is
// within tolerance.
template <typename F>
Result Integrate(F&& f, double a, double b, const Tolerance& tol = {}) {
  std::priority_queue<detail::Piece> pieces;
  pieces.push(detail::Kronrod15(f, a, b));
  double value = pieces.top().value;
  double error = pieces.top().error;
  while (true) {
    if (!std::isfinite(value) || !std::isfinite(error)) {
      if (pieces.size() >= tol.max_intervals) return {value, error, false};
    } else if (error <= std::max(tol.absolute, tol.relative * std::abs(value))) {
      return {value, error, true};
    }
    if (pieces.size() >= tol.max_intervals) return {value, error, false};
    const detail::Piece worst = pieces.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) return {value, error, false};
    pieces.pop();
    const detail::Piece left = detail::Kronrod15(f, worst.a, mid);
    const detail::Piece right = detail::Kronrod15(f, mid, worst.b);
    pieces.push(left);
    pieces.push(right);
    if (std::isfinite(worst.value) && std::isfinite(worst.error)) {
      value += left.value + right.value - worst.value;
      error += left.error + right.error - worst.error;
    } else {
      value = 0.0;
      error = 0.0;
      auto copy = pieces;
      for (; !copy.empty(); copy.pop()) {
        value += copy.top().value;
        error += copy.top().error;
      }
    }
  }
}

// E[f(X)] for X ~ Exp(rate). The half line is covered by chunks
// [0, 1/rate], [1/rate, 2/rate], [2/rate, 4/rate], ... and integration stops
// once a chunk past 32/rate contributes less than 1e-15 of the running sum.
// converged == false when the tail never dies out (divergent expectation) or
// a chunk fails to integrate.
template <typename F>
Result ExpectExponential(F&& f, double rate, const Tolerance& tol = {}) {
  auto weighted = [&](double x) { return f(x) * rate * std::exp(-rate * x); };
  Result total{0.0, 0.0, true};
  double lo = 0.0;
  double hi = 1.0 / rate;
  for (int chunk = 0; chunk < 64; ++chunk) {
    const Result part = Integrate(weighted, lo, hi, tol);
    if (!part.converged || !std::isfinite(part.value)) {
      return {total.value + part.value, INFINITY, false};
    }
    total.value += part.value;
    total.error += part.error;
    if (hi * rate >= 32.0 &&
        std::abs(part.value) <= 1e-15 * std::max(1.0, std::abs(total.value))) {
      return total;
    }
    lo = hi;
    hi *= 2.0;
  }
  total.converged = false;
  return total;
}

}  // namespace aoi_lab::quadrature
