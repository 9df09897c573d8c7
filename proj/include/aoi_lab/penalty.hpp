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
#include <variant>

#include "aoi_lab/errors.hpp"

namespace aoi_lab {

// Age penalty g(x), nondecreasing on [0, inf) with g(0) >= 0.
class AgePenalty {
 public:
  struct Linear {};
  struct Power {
    double exponent;
  };
  struct Exponential {
    double alpha;
  };
  using Variant = std::variant<Linear, Power, Exponential>;

  AgePenalty() = default;

  static AgePenalty MakeLinear() { return AgePenalty(Linear{}); }

  static AgePenalty MakePower(double exponent) {
    if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
      throw Error(ErrorCode::kInvalidArgument, "power exponent must be >= 1");
    }
    return AgePenalty(Power{exponent});
  }

  static AgePenalty MakeExponential(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "exponential penalty rate must be positive");
    }
    return AgePenalty(Exponential{alpha});
  }

  const Variant& variant() const noexcept { return variant_; }
  bool is_linear() const noexcept {
    return std::holds_alternative<Linear>(variant_);
  }

  double operator()(double x) const {
    if (!(x >= 0.0)) {
      throw Error(ErrorCode::kDomain, "age penalty needs a nonnegative age");
    }
    return EvalUnchecked(x);
  }

  // Integral of g(start + t) for t in [0, length]; closed form for every
  // shipped variant.
  double Integral(double start, double length) const {
    if (!(start >= 0.0) || !(length >= 0.0)) {
      throw Error(ErrorCode::kDomain,
                  "penalty integral needs nonnegative start and length");
    }
    if (std::holds_alternative<Linear>(variant_)) {
      return start * length + 0.5 * length * length;
    }
    if (const auto* p = std::get_if<Power>(&variant_)) {
      const double q = p->exponent + 1.0;
      return (std::pow(start + length, q) - std::pow(start, q)) / q;
    }
    const double a = std::get<Exponential>(variant_).alpha;
    // (e^{a(s+L)} - e^{as}) / a - L, written to keep precision for small aL.
    return std::exp(a * start) * std::expm1(a * length) / a - length;
  }

  std::string Describe() const {
    if (std::holds_alternative<Linear>(variant_)) return "linear";
    if (const auto* p = std::get_if<Power>(&variant_)) {
      return "power(p=" + std::to_string(p->exponent) + ")";
    }
    return "exp(alpha=" + std::to_string(std::get<Exponential>(variant_).alpha) +
           ")";
  }

 private:
  explicit AgePenalty(Variant v) : variant_(v) {}

  double EvalUnchecked(double x) const {
    if (std::holds_alternative<Linear>(variant_)) return x;
    if (const auto* p = std::get_if<Power>(&variant_)) {
      return std::pow(x, p->exponent);
    }
    return std::expm1(std::get<Exponential>(variant_).alpha * x);
  }

  Variant variant_ = Linear{};
};

inline double PenaltyEval(const AgePenalty& g, double x) { return g(x); }

}  // namespace aoi_lab
