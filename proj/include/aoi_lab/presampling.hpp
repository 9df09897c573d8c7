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
#include <cmath>
#include <string>

#include "aoi_lab/busy_time.hpp"
#include "aoi_lab/errors.hpp"
#include "aoi_lab/penalty.hpp"

namespace aoi_lab {

// Error-free channel with effective busy time b~ = zeta + b.
struct PolicyContext {
  BusyTimeDistribution busy = BusyTimeDistribution::MakeExponential(1.0);
  double zeta = 0.0;
  AgePenalty penalty = AgePenalty::MakeLinear();

  double effective_mean() const { return zeta + busy.mean(); }
};

// Threshold pre-sampling policy w(t) = [G_t^{-1}(gamma)]^+. Because
// G_t(x) = E[g(t + x + b~)] depends on t + x only, the policy waits until
// the age reaches age_threshold, i.e. w(t) = [age_threshold - t]^+.
struct ThresholdPolicy {
  double gamma = 0.0;
  double age_threshold = 0.0;
  double residual = 0.0;  // |F(gamma)| at the returned gamma
  PolicyContext context;
};

namespace detail {

// H(s) = E[g(s + b~)]; G_t(x) = H(t + x).
inline double ExpectedPenaltyAt(const PolicyContext& ctx, double s) {
  if (ctx.penalty.is_linear()) return s + ctx.effective_mean();
  return ctx.busy.Expect([&](double b) { return ctx.penalty(s + ctx.zeta + b); },
                         ErrorCode::kDivergentPenalty);
}

// Root of H(s) = gamma on s >= lower where H(lower) < gamma.
inline double SolveExpectedPenalty(const PolicyContext& ctx, double gamma,
                                   double lower) {
  double lo = lower;
  double hi = std::max(lower, 0.0) + 1.0;
  while (ExpectedPenaltyAt(ctx, hi) < gamma) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1.0p60) {
      throw Error(ErrorCode::kBracketFailure,
                  "expected penalty never reaches gamma");
    }
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * std::max(1.0, hi);
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (ExpectedPenaltyAt(ctx, mid) < gamma) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// max(0, s*) with H(s*) = gamma.
inline double AgeThreshold(const PolicyContext& ctx, double gamma) {
  if (ctx.penalty.is_linear()) {
    return std::max(0.0, gamma - ctx.effective_mean());
  }
  if (ExpectedPenaltyAt(ctx, 0.0) >= gamma) return 0.0;
  return SolveExpectedPenalty(ctx, gamma, 0.0);
}

}  // namespace detail

// G_t(x) = E[g(t + x + b~)].
inline double GBar(const PolicyContext& ctx, double t, double x) {
  if (!(t >= 0.0) || !(x >= 0.0)) {
    throw Error(ErrorCode::kDomain, "G_t(x) needs t >= 0 and x >= 0");
  }
  return detail::ExpectedPenaltyAt(ctx, t + x);
}

// The x with G_t(x) = gamma, possibly negative. Linear penalties and power
// penalties over a deterministic busy time use the closed-form inverse;
// otherwise the root is searched where the penalty's argument stays
// nonnegative and kBracketFailure is raised if it lies below that range.
inline double InverseG(const PolicyContext& ctx, double t, double gamma) {
  if (!(t >= 0.0)) throw Error(ErrorCode::kDomain, "t must be nonnegative");
  if (ctx.penalty.is_linear()) return gamma - t - ctx.effective_mean();
  const auto* power = std::get_if<AgePenalty::Power>(&ctx.penalty.variant());
  if (power != nullptr && ctx.busy.is_deterministic()) {
    if (gamma < 0.0) {
      throw Error(ErrorCode::kBracketFailure,
                  "power penalty never takes negative values");
    }
    return std::pow(gamma, 1.0 / power->exponent) - t - ctx.effective_mean();
  }
  const double lower = -(ctx.zeta + ctx.busy.support_min());
  if (detail::ExpectedPenaltyAt(ctx, lower) > gamma) {
    throw Error(ErrorCode::kBracketFailure,
                "gamma is below the range of G_t");
  }
  return detail::SolveExpectedPenalty(ctx, gamma, lower) - t;
}

inline double WaitTime(const ThresholdPolicy& policy, double starting_age) {
  if (!(starting_age >= 0.0)) {
    throw Error(ErrorCode::kDomain, "starting age must be nonnegative");
  }
  return std::max(0.0, policy.age_threshold - starting_age);
}

// F(gamma) = E[int_0^{w(b~') + b~} g(b~' + t) dt] - gamma E[w(b~') + b~]
// with b~', b~ independent effective busy times. Nonincreasing in gamma,
// positive at gamma = 0.
inline double GammaEquation(const PolicyContext& ctx, double gamma) {
  const double threshold = detail::AgeThreshold(ctx, gamma);
  const double m1 = ctx.busy.mean();
  const double m2 = ctx.busy.second_moment();
  auto per_start = [&](double b_prev) {
    const double start = ctx.zeta + b_prev;
    const double lead = std::max(0.0, threshold - start) + ctx.zeta;
    double cost;
    if (ctx.penalty.is_linear()) {
      cost = start * (lead + m1) + 0.5 * (lead * lead + 2.0 * lead * m1 + m2);
    } else {
      cost = ctx.busy.Expect(
          [&](double b) { return ctx.penalty.Integral(start, lead + b); },
          ErrorCode::kDivergentPenalty);
    }
    return cost - gamma * (lead + m1);
  };
  return ctx.busy.Expect(per_start, ErrorCode::kDivergentPenalty);
}

// Bisection on the unique root of GammaEquation. The bracket starts at
// [0, 1] and doubles its upper end until F < 0.
inline ThresholdPolicy SolveGamma(const PolicyContext& ctx) {
  if (!(ctx.zeta >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "post-sampling wait must be nonnegative");
  }
  double lo = 0.0;
  double hi = 1.0;
  double f_hi = GammaEquation(ctx, hi);
  while (f_hi >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1.0p60) {
      throw Error(ErrorCode::kBracketFailure, "gamma bracket does not close");
    }
    f_hi = GammaEquation(ctx, hi);
  }
  double best = hi;
  double best_residual = std::abs(f_hi);
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * std::max(1.0, hi);
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = GammaEquation(ctx, mid);
    if (std::abs(f_mid) <= best_residual) {
      best = mid;
      best_residual = std::abs(f_mid);
    }
    if (f_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  ThresholdPolicy policy;
  policy.gamma = best;
  policy.age_threshold = detail::AgeThreshold(ctx, best);
  policy.residual = best_residual;
  policy.context = ctx;
  return policy;
}

// Policy with a fixed gamma (no root solve).
inline ThresholdPolicy MakeThresholdPolicy(const PolicyContext& ctx,
                                           double gamma) {
  ThresholdPolicy policy;
  policy.gamma = gamma;
  policy.age_threshold = detail::AgeThreshold(ctx, gamma);
  policy.residual = std::abs(GammaEquation(ctx, gamma));
  policy.context = ctx;
  return policy;
}

}  // namespace aoi_lab
