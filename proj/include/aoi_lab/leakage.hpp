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
#include <limits>
#include <string>
#include <variant>

#include "aoi_lab/busy_time.hpp"
#include "aoi_lab/errors.hpp"

namespace aoi_lab {

// Leakage-versus-age function rho(a), nonincreasing in a.
class LeakageModel {
 public:
  // Mutual information between the latest sample of an OU process
  // (parameters sigma2, theta) and a noisy observation of the current value
  // (noise variance sigma02).
  struct OUMutualInfo {
    double sigma2;
    double theta;
    double sigma02;
  };
  // Estimation-accuracy leakage 1 / (1 - sigma02 / (sigma02 + a)).
  struct WienerEstimation {
    double sigma02;
  };
  // scale * e^{-a}; used for closed-form checks.
  struct SyntheticExp {
    double scale;
  };
  using Variant = std::variant<OUMutualInfo, WienerEstimation, SyntheticExp>;

  LeakageModel() : variant_(SyntheticExp{1.0}) {}

  static LeakageModel MakeOU(double sigma2, double theta, double sigma02) {
    if (!(sigma2 > 0.0) || !(theta > 0.0) || !(sigma02 > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "OU leakage parameters must be positive");
    }
    return LeakageModel(OUMutualInfo{sigma2, theta, sigma02});
  }

  static LeakageModel MakeWiener(double sigma02) {
    if (!(sigma02 > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "estimation leakage variance must be positive");
    }
    return LeakageModel(WienerEstimation{sigma02});
  }

  static LeakageModel MakeSyntheticExp(double scale) {
    if (!(scale > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "synthetic leakage scale must be positive");
    }
    return LeakageModel(SyntheticExp{scale});
  }

  const Variant& variant() const noexcept { return variant_; }

  bool diverges_at_zero() const noexcept {
    return std::holds_alternative<WienerEstimation>(variant_);
  }

  // lim_{a -> inf} rho(a).
  double floor() const noexcept { return diverges_at_zero() ? 1.0 : 0.0; }

  double operator()(double age) const {
    if (!(age >= 0.0)) {
      throw Error(ErrorCode::kDomain, "leakage needs a nonnegative age");
    }
    if (const auto* ou = std::get_if<OUMutualInfo>(&variant_)) {
      const double stationary = ou->sigma2 / (2.0 * ou->theta);
      const double decayed = stationary * -std::expm1(-2.0 * ou->theta * age);
      return 0.5 * std::log((stationary + ou->sigma02) /
                            (decayed + ou->sigma02));
    }
    if (const auto* w = std::get_if<WienerEstimation>(&variant_)) {
      if (age == 0.0) {
        throw Error(ErrorCode::kDivergentLeakage,
                    "estimation leakage diverges at age 0");
      }
      return 1.0 + w->sigma02 / age;
    }
    return std::get<SyntheticExp>(variant_).scale * std::exp(-age);
  }

  std::string Describe() const {
    if (const auto* ou = std::get_if<OUMutualInfo>(&variant_)) {
      return "ou(sigma2=" + std::to_string(ou->sigma2) +
             ",theta=" + std::to_string(ou->theta) +
             ",sigma02=" + std::to_string(ou->sigma02) + ")";
    }
    if (const auto* w = std::get_if<WienerEstimation>(&variant_)) {
      return "wiener(sigma02=" + std::to_string(w->sigma02) + ")";
    }
    return "synth-exp(scale=" +
           std::to_string(std::get<SyntheticExp>(variant_).scale) + ")";
  }

 private:
  explicit LeakageModel(Variant v) : variant_(v) {}

  Variant variant_;
};

inline double LeakageEval(const LeakageModel& model, double age) {
  return model(age);
}

// E[rho(shift + b)].
inline double ExpectedLeakage(const LeakageModel& model,
                              const BusyTimeDistribution& dist, double shift) {
  if (!(shift >= 0.0)) {
    throw Error(ErrorCode::kDomain, "leakage shift must be nonnegative");
  }
  if (model.diverges_at_zero() && shift == 0.0 && dist.is_exponential()) {
    throw Error(ErrorCode::kDivergentLeakage,
                "estimation leakage is not integrable against an exponential "
                "busy time without a post-sampling wait");
  }
  return dist.Expect([&](double b) { return model(shift + b); },
                     ErrorCode::kDivergentLeakage);
}

struct ZetaSolution {
  double zeta = 0.0;
  // E[rho(b)] <= delta: the channel delay alone meets the budget.
  bool natural_cover = false;
  // |E[rho(zeta + b)] - delta| when the budget binds, 0 otherwise.
  double residual = 0.0;
};

// Smallest post-sampling wait zeta with E[rho(zeta + b)] <= delta.
//
// The map xi -> E[rho(xi + b)] is nonincreasing, so the binding root is
// bracketed by doubling the upper end from 1 (capped at 2^60) and then
// bisected until the bracket is narrower than 1e-12 or the residual falls
// below 1e-11.
inline ZetaSolution SolveZeta(const LeakageModel& model,
                              const BusyTimeDistribution& dist, double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::kInvalidArgument,
                "leakage budget must be nonnegative and finite");
  }
  if (delta <= model.floor()) {
    throw Error(ErrorCode::kInfeasibleBudget,
                "budget " + std::to_string(delta) +
                    " is not above the leakage floor " +
                    std::to_string(model.floor()));
  }

  double at_zero = std::numeric_limits<double>::infinity();
  try {
    at_zero = ExpectedLeakage(model, dist, 0.0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDivergentLeakage) throw;
  }
  if (at_zero <= delta) return {0.0, true, 0.0};

  auto excess = [&](double xi) {
    return ExpectedLeakage(model, dist, xi) - delta;
  };

  double lo = 0.0;
  double hi = 1.0;
  constexpr double kCap = 0x1.0p60;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kCap) {
      throw Error(ErrorCode::kInfeasibleBudget,
                  "no post-sampling wait up to 2^60 meets the budget");
    }
  }

  double mid = 0.5 * (lo + hi);
  double value = excess(mid);
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(value) <= 1e-11 || hi - lo <= 1e-12) break;
    if (value > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    value = excess(mid);
  }
  return {mid, false, std::abs(value)};
}

}  // namespace aoi_lab
