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
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "aoi_lab/errors.hpp"
#include "aoi_lab/quadrature.hpp"
#include "aoi_lab/random.hpp"

namespace aoi_lab {

// Distribution of the channel busy time b of a single transmission attempt.
// Instances are immutable; moments are fixed at construction.
class BusyTimeDistribution {
 public:
  struct Exponential {
    double rate;
  };
  struct Deterministic {
    double value;
  };
  struct Empirical {
    std::vector<double> samples;
  };
  using Variant = std::variant<Exponential, Deterministic, Empirical>;

  static BusyTimeDistribution MakeExponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "exponential rate must be positive and finite");
    }
    const double mean = 1.0 / rate;
    return BusyTimeDistribution(Exponential{rate}, mean, 2.0 * mean * mean);
  }

  static BusyTimeDistribution MakeDeterministic(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "deterministic busy time must be positive and finite");
    }
    return BusyTimeDistribution(Deterministic{value}, value, value * value);
  }

  static BusyTimeDistribution MakeEmpirical(std::vector<double> samples) {
    if (samples.empty()) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "empirical sample list is empty");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : samples) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "empirical samples must be positive and finite");
      }
      sum += x;
      sum_sq += x * x;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = sum / n;
    const double second = sum_sq / n;
    return BusyTimeDistribution(Empirical{std::move(samples)}, mean, second);
  }

  const Variant& variant() const noexcept { return variant_; }
  double mean() const noexcept { return mean_; }
  double second_moment() const noexcept { return second_moment_; }
  double variance() const noexcept { return second_moment_ - mean_ * mean_; }

  bool is_exponential() const noexcept {
    return std::holds_alternative<Exponential>(variant_);
  }
  bool is_deterministic() const noexcept {
    return std::holds_alternative<Deterministic>(variant_);
  }

  // Rate for Exponential, value for Deterministic, mean for Empirical.
  double parameter() const noexcept {
    if (const auto* e = std::get_if<Exponential>(&variant_)) return e->rate;
    if (const auto* d = std::get_if<Deterministic>(&variant_)) return d->value;
    return mean_;
  }

  // Infimum of the support.
  double support_min() const noexcept {
    if (is_exponential()) return 0.0;
    if (const auto* d = std::get_if<Deterministic>(&variant_)) return d->value;
    const auto& s = std::get<Empirical>(variant_).samples;
    double m = s.front();
    for (double x : s) m = std::min(m, x);
    return m;
  }

  double Sample(RandomSource& rng) const {
    return std::visit(
        [&rng](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Exponential>) {
            return -std::log(rng.UniformOpen()) / d.rate;
          } else if constexpr (std::is_same_v<T, Deterministic>) {
            return d.value;
          } else {
            return d.samples[rng.UniformIndex(d.samples.size())];
          }
        },
        variant_);
  }

  // E[f(b)]: point evaluation, sample average, or Gauss-Kronrod quadrature
  // against the exponential density. Throws `on_divergence` if the
  // quadrature cannot establish a finite value.
  template <typename F>
  double Expect(F&& f, ErrorCode on_divergence) const {
    if (const auto* d = std::get_if<Deterministic>(&variant_)) {
      const double v = f(d->value);
      if (!std::isfinite(v)) {
        throw Error(on_divergence, "expectation is not finite");
      }
      return v;
    }
    if (const auto* e = std::get_if<Empirical>(&variant_)) {
      double sum = 0.0;
      for (double x : e->samples) sum += f(x);
      const double v = sum / static_cast<double>(e->samples.size());
      if (!std::isfinite(v)) {
        throw Error(on_divergence, "expectation is not finite");
      }
      return v;
    }
    const double rate = std::get<Exponential>(variant_).rate;
    const quadrature::Result r = quadrature::ExpectExponential(f, rate);
    if (!r.converged || !std::isfinite(r.value)) {
      throw Error(on_divergence,
                  "expectation over exponential busy time does not converge");
    }
    return r.value;
  }

  std::string Describe() const {
    return std::visit(
        [](const auto& d) -> std::string {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Exponential>) {
            return "exp(rate=" + std::to_string(d.rate) + ")";
          } else if constexpr (std::is_same_v<T, Deterministic>) {
            return "det(value=" + std::to_string(d.value) + ")";
          } else {
            return "empirical(n=" + std::to_string(d.samples.size()) + ")";
          }
        },
        variant_);
  }

 private:
  BusyTimeDistribution(Variant v, double mean, double second)
      : variant_(std::move(v)), mean_(mean), second_moment_(second) {}

  Variant variant_;
  double mean_;
  double second_moment_;
};

inline double BusyMean(const BusyTimeDistribution& dist) { return dist.mean(); }

inline double BusySecondMoment(const BusyTimeDistribution& dist) {
  return dist.second_moment();
}

inline double SampleBusy(const BusyTimeDistribution& dist, RandomSource& rng) {
  return dist.Sample(rng);
}

}  // namespace aoi_lab
