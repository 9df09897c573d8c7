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

#include <cmath>
#include <string>
#include <vector>

#include "aoi_lab/errors.hpp"
#include "aoi_lab/params.hpp"

namespace aoi_lab {

// First and second moments of a busy time, E[b] and E[b^2].
struct BusyMoments {
  double mean = 0.0;
  double second = 0.0;

  static BusyMoments Of(const BusyTimeDistribution& dist) {
    return {dist.mean(), dist.second_moment()};
  }
  double variance() const { return second - mean * mean; }
};

struct RetransMoments {
  double e_r = 1.0;     // E[R], samples generated per epoch
  double e_r2 = 1.0;    // E[R^2]
  double e_psi = 1.0;   // E[psi], attempts used by the delivered sample
  double e_psi2 = 1.0;  // E[psi^2]
  double e_n2 = 0.0;    // E[(R-1)^2]
};

struct EpochMoments {
  double e_l = 0.0;
  double e_l2 = 0.0;
  // E[L^2] with the cross-sample term (E[R-1])^2 K^2 E[b]^2 in place of
  // E[(R-1)^2] K^2 E[b]^2; kept only for comparison against simulation.
  double e_l2_paper_variant = 0.0;
};

struct AnalyticReport {
  double epsilon = 0.0;
  int k_max = 1;
  double zeta = 0.0;
  RetransMoments moments;
  double e_l = 0.0;
  double e_l2 = 0.0;
  double e_l2_paper_variant = 0.0;
  double avg_age = 0.0;
  double avg_age_paper_variant = 0.0;
};

namespace detail {

inline void CheckChannel(double epsilon, int k_max) {
  if (epsilon == 1.0) {
    throw Error(ErrorCode::kDegenerateChannel,
                "erasure probability 1 never delivers an update");
  }
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "erasure probability must lie in [0, 1)");
  }
  if (k_max < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "retransmission cap must be at least 1");
  }
}

}  // namespace detail

struct RMoments {
  double e_r;
  double e_r2;
};

// R ~ geometric(1 - eps^K) on {1, 2, ...}.
inline RMoments MomentsR(double epsilon, int k_max) {
  detail::CheckChannel(epsilon, k_max);
  const double fail = std::pow(epsilon, k_max);
  const double success = 1.0 - fail;
  return {1.0 / success, (1.0 + fail) / (success * success)};
}

struct PsiMoments {
  double e_psi;
  double e_psi2;
};

// psi is geometric(1 - eps) truncated to {1, ..., K}.
inline PsiMoments MomentsPsi(double epsilon, int k_max) {
  detail::CheckChannel(epsilon, k_max);
  if (k_max == 1 || epsilon == 0.0) return {1.0, 1.0};
  const double k = k_max;
  const double ek = std::pow(epsilon, k_max);
  const double ek1 = ek * epsilon;
  const double ek2 = ek1 * epsilon;
  const double one_minus = 1.0 - epsilon;
  const double norm = (1.0 - ek) * one_minus;
  const double e_psi = (1.0 - (k + 1.0) * ek + k * ek1) / norm;
  const double e_psi2 = (1.0 + epsilon - (k + 1.0) * (k + 1.0) * ek +
                         (2.0 * k * k + 2.0 * k - 1.0) * ek1 - k * k * ek2) /
                        (norm * one_minus);
  return {e_psi, e_psi2};
}

inline RetransMoments ComputeRetransMoments(double epsilon, int k_max) {
  const RMoments r = MomentsR(epsilon, k_max);
  const PsiMoments psi = MomentsPsi(epsilon, k_max);
  return {r.e_r, r.e_r2, psi.e_psi, psi.e_psi2, r.e_r2 - 2.0 * r.e_r + 1.0};
}

// Moments of the epoch length
//   L = R zeta + sum_{r<R} sum_{k<=K} b + sum_{k<=psi} b
// with zero pre-sampling wait. R, psi and the busy times are independent,
// so E[L^2] = E[A^2] + E[B^2] + 2 E[A] E[B] with A the first two terms and
// B the busy time of the delivered sample.
inline EpochMoments ComputeEpochMoments(double epsilon, int k_max,
                                        const BusyMoments& busy, double zeta) {
  if (!(zeta >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "post-sampling wait must be nonnegative");
  }
  const RetransMoments m = ComputeRetransMoments(epsilon, k_max);
  const double k = k_max;
  const double b1 = busy.mean;
  const double var = busy.variance();
  const double e_n = m.e_r - 1.0;

  // Busy time of the discarded samples: N K draws, N = R - 1.
  const double failed_sq = e_n * k * var + m.e_n2 * k * k * b1 * b1;
  const double failed_sq_paper = e_n * k * var + e_n * e_n * k * k * b1 * b1;
  const double head_rest = m.e_r2 * zeta * zeta +
                           2.0 * (m.e_r2 - m.e_r) * zeta * k * b1;
  const double tail_sq = m.e_psi * var + m.e_psi2 * b1 * b1;
  const double head_mean = m.e_r * zeta + e_n * k * b1;
  const double tail_mean = m.e_psi * b1;
  const double cross = 2.0 * head_mean * tail_mean;

  EpochMoments out;
  out.e_l = head_mean + tail_mean;
  out.e_l2 = head_rest + failed_sq + tail_sq + cross;
  out.e_l2_paper_variant = head_rest + failed_sq_paper + tail_sq + cross;
  return out;
}

inline EpochMoments ComputeEpochMoments(const SystemParams& params,
                                        double zeta) {
  params.Validate();
  return ComputeEpochMoments(params.epsilon, params.k_max,
                             BusyMoments::Of(params.busy), zeta);
}

// Long-term average AoI for g(x) = x and zero pre-sampling wait:
//   zeta + E[psi] E[b] + E[L^2] / (2 E[L]).
inline AnalyticReport AverageAge(double epsilon, int k_max,
                                 const BusyMoments& busy, double zeta) {
  const EpochMoments epoch = ComputeEpochMoments(epsilon, k_max, busy, zeta);
  AnalyticReport report;
  report.epsilon = epsilon;
  report.k_max = k_max;
  report.zeta = zeta;
  report.moments = ComputeRetransMoments(epsilon, k_max);
  report.e_l = epoch.e_l;
  report.e_l2 = epoch.e_l2;
  report.e_l2_paper_variant = epoch.e_l2_paper_variant;
  const double start_age = zeta + report.moments.e_psi * busy.mean;
  report.avg_age = start_age + 0.5 * epoch.e_l2 / epoch.e_l;
  report.avg_age_paper_variant =
      start_age + 0.5 * epoch.e_l2_paper_variant / epoch.e_l;
  return report;
}

inline AnalyticReport AverageAge(const SystemParams& params, double zeta) {
  params.Validate();
  if (!params.penalty.is_linear()) {
    throw Error(ErrorCode::kUnsupportedClosedForm,
                "closed-form average age needs the linear penalty; use the "
                "simulator for " + params.penalty.Describe());
  }
  return AverageAge(params.epsilon, params.k_max, BusyMoments::Of(params.busy),
                    zeta);
}

struct KSearchResult {
  int k_star = 1;
  std::vector<AnalyticReport> curve;  // curve[k - 1] is the report for K = k
};

// Evaluates K = 1..k_search_max at fixed zeta; ties go to the smaller K.
inline KSearchResult OptimalK(const SystemParams& params, double zeta,
                              int k_search_max) {
  if (k_search_max < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k_search_max must be >= 1");
  }
  KSearchResult result;
  result.curve.reserve(static_cast<std::size_t>(k_search_max));
  double best = 0.0;
  for (int k = 1; k <= k_search_max; ++k) {
    SystemParams p = params;
    p.k_max = k;
    result.curve.push_back(AverageAge(p, zeta));
    const double age = result.curve.back().avg_age;
    if (k == 1 || age < best) {
      best = age;
      result.k_star = k;
    }
  }
  return result;
}

}  // namespace aoi_lab
