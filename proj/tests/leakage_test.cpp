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

#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "aoi_lab/busy_time.hpp"
#include "aoi_lab/errors.hpp"
#include "aoi_lab/leakage.hpp"
#include "aoi_lab/random.hpp"

namespace aoi_lab {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

const LeakageModel kOU = LeakageModel::MakeOU(2.0, 1.0, 1.0);

TEST(LeakageEval, OUValues) {
  EXPECT_NEAR(LeakageEval(kOU, 0.0), 0.346573590279972654708616060729, 1e-15);
  // 30-digit reference from mpmath: 0.5 * log(2 / (2 - e^-1)).
  EXPECT_NEAR(LeakageEval(kOU, 0.5), 0.101633527457597666352035512195, 1e-15);
  EXPECT_NEAR(LeakageEval(kOU, 50.0), 0.0, 1e-15);
}

TEST(LeakageEval, WienerAndSynthetic) {
  const auto wiener = LeakageModel::MakeWiener(2.0);
  EXPECT_DOUBLE_EQ(LeakageEval(wiener, 2.0), 1.0 / (1.0 - 2.0 / 4.0));
  EXPECT_EQ(CodeOf([&] { LeakageEval(wiener, 0.0); }),
            ErrorCode::kDivergentLeakage);
  EXPECT_DOUBLE_EQ(LeakageEval(LeakageModel::MakeSyntheticExp(3.0), 1.0),
                   3.0 * std::exp(-1.0));
}

TEST(LeakageEval, NonincreasingOnLogGrid) {
  for (const auto& model :
       {kOU, LeakageModel::MakeOU(0.5, 3.0, 0.1), LeakageModel::MakeWiener(1.0),
        LeakageModel::MakeSyntheticExp(1.0)}) {
    double prev = model(1e-6);
    for (double a = 1e-6; a < 1e4; a *= 1.25) {
      const double v = model(a);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, prev) << model.Describe() << " at " << a;
      prev = v;
    }
  }
}

TEST(ExpectedLeakage, ClosedFormCases) {
  const auto synth = LeakageModel::MakeSyntheticExp(1.0);
  const auto exp1 = BusyTimeDistribution::MakeExponential(1.0);
  // int_0^inf e^{-x} e^{-x} dx = 1/2.
  EXPECT_NEAR(ExpectedLeakage(synth, exp1, 0.0), 0.5, 1e-12);
  EXPECT_NEAR(ExpectedLeakage(synth, BusyTimeDistribution::MakeDeterministic(2.0),
                              1.0),
              0.0497870683678639429793424156501, 1e-15);
  EXPECT_NEAR(ExpectedLeakage(synth, exp1, std::log(2.0)), 0.25, 1e-12);
}

TEST(ExpectedLeakage, OUAgainstHighPrecisionQuadrature) {
  const auto exp10 = BusyTimeDistribution::MakeExponential(10.0);
  // mpmath quad at 30 digits.
  EXPECT_NEAR(ExpectedLeakage(kOU, exp10, 0.0),
              0.272885367987514370699568784065, 1e-11);
  EXPECT_NEAR(ExpectedLeakage(kOU, exp10, 0.3),
              0.130426449306628639547441502726, 1e-11);
}

TEST(ExpectedLeakage, EmpiricalIsSampleAverage) {
  const std::vector<double> samples = {0.2, 0.5, 1.5};
  double brute = 0.0;
  for (double x : samples) brute += kOU(0.1 + x);
  EXPECT_NEAR(ExpectedLeakage(kOU, BusyTimeDistribution::MakeEmpirical(samples),
                              0.1),
              brute / 3.0, 1e-15);
}

TEST(ExpectedLeakage, WienerWithoutShiftDiverges) {
  const auto wiener = LeakageModel::MakeWiener(1.0);
  const auto exp1 = BusyTimeDistribution::MakeExponential(1.0);
  EXPECT_EQ(CodeOf([&] { ExpectedLeakage(wiener, exp1, 0.0); }),
            ErrorCode::kDivergentLeakage);
  EXPECT_TRUE(std::isfinite(ExpectedLeakage(wiener, exp1, 0.1)));
}

// The quadrature engine against plain Monte Carlo, 1e7 draws per pair.
TEST(ExpectedLeakage, AgreesWithMonteCarlo) {
  struct Case {
    LeakageModel model;
    BusyTimeDistribution dist;
    double shift;
  };
  const std::vector<Case> cases = {
      {kOU, BusyTimeDistribution::MakeExponential(10.0), 0.0},
      {kOU, BusyTimeDistribution::MakeExponential(1.0), 0.2},
      {LeakageModel::MakeWiener(1.0), BusyTimeDistribution::MakeExponential(1.0),
       0.1},
      {LeakageModel::MakeSyntheticExp(2.0),
       BusyTimeDistribution::MakeExponential(3.0), 0.0},
      {kOU, BusyTimeDistribution::MakeEmpirical({0.1, 0.4, 0.9}), 0.05},
      {LeakageModel::MakeWiener(0.5), BusyTimeDistribution::MakeDeterministic(0.3),
       0.0},
  };
  RandomSource rng(555);
  constexpr int kN = 10'000'000;
  for (const auto& c : cases) {
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < kN; ++i) {
      const double v = c.model(c.shift + c.dist.Sample(rng));
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / kN;
    const double se = std::sqrt(std::max(0.0, sum_sq / kN - mean * mean) / kN);
    const double quad = ExpectedLeakage(c.model, c.dist, c.shift);
    EXPECT_LE(std::abs(quad - mean), 3.0 * se + 1e-9)
        << c.model.Describe() << " / " << c.dist.Describe();
  }
}

// Independent oracle: bisection on the closed form e^{-xi} / 2 = delta.
double SyntheticZetaOracle(double delta) {
  double lo = 0.0, hi = 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::exp(-mid) / 2.0 > delta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(SolveZeta, SyntheticBindingBudget) {
  const auto synth = LeakageModel::MakeSyntheticExp(1.0);
  const auto exp1 = BusyTimeDistribution::MakeExponential(1.0);
  const ZetaSolution sol = SolveZeta(synth, exp1, 0.25);
  EXPECT_FALSE(sol.natural_cover);
  EXPECT_NEAR(sol.zeta, std::log(2.0), 1e-9);
  EXPECT_NEAR(sol.zeta, SyntheticZetaOracle(0.25), 1e-9);
  EXPECT_LE(sol.residual, 1e-9);
  for (double delta : {0.01, 0.1, 0.3, 0.45}) {
    EXPECT_NEAR(SolveZeta(synth, exp1, delta).zeta, SyntheticZetaOracle(delta),
                1e-9);
  }
}

TEST(SolveZeta, NaturalCover) {
  const auto synth = LeakageModel::MakeSyntheticExp(1.0);
  const auto exp1 = BusyTimeDistribution::MakeExponential(1.0);
  const ZetaSolution sol = SolveZeta(synth, exp1, 0.75);
  EXPECT_TRUE(sol.natural_cover);
  EXPECT_EQ(sol.zeta, 0.0);
  // E[rho(b)] == delta exactly counts as covered.
  const ZetaSolution tie =
      SolveZeta(synth, BusyTimeDistribution::MakeDeterministic(1.0),
                std::exp(-1.0));
  EXPECT_TRUE(tie.natural_cover);
  EXPECT_EQ(tie.zeta, 0.0);
}

TEST(SolveZeta, OUBindingResidual) {
  const auto exp10 = BusyTimeDistribution::MakeExponential(10.0);
  // Budget equal to E[rho(0.3 + b)] from the mpmath reference.
  const double delta = 0.130426449306628639547441502726;
  const ZetaSolution sol = SolveZeta(kOU, exp10, delta);
  EXPECT_FALSE(sol.natural_cover);
  EXPECT_NEAR(sol.zeta, 0.3, 1e-8);
  EXPECT_LE(std::abs(ExpectedLeakage(kOU, exp10, sol.zeta) - delta), 1e-9);
  for (double d : {0.05, 0.1, 0.2, 0.25}) {
    const ZetaSolution s = SolveZeta(kOU, exp10, d);
    EXPECT_FALSE(s.natural_cover);
    EXPECT_LE(std::abs(ExpectedLeakage(kOU, exp10, s.zeta) - d), 1e-9) << d;
  }
}

TEST(SolveZeta, WienerWithExponentialBusy) {
  const auto wiener = LeakageModel::MakeWiener(1.0);
  const auto exp1 = BusyTimeDistribution::MakeExponential(1.0);
  const ZetaSolution sol = SolveZeta(wiener, exp1, 2.0);
  EXPECT_FALSE(sol.natural_cover);
  EXPECT_GT(sol.zeta, 0.0);
  EXPECT_LE(std::abs(ExpectedLeakage(wiener, exp1, sol.zeta) - 2.0), 1e-9);
}

TEST(SolveZeta, BudgetMonotonicity) {
  const auto exp10 = BusyTimeDistribution::MakeExponential(10.0);
  double prev = INFINITY;
  for (double delta = 0.02; delta < 0.4; delta += 0.02) {
    const double z = SolveZeta(kOU, exp10, delta).zeta;
    EXPECT_LE(z, prev) << delta;
    prev = z;
  }
}

TEST(SolveZeta, InfeasibleBudgets) {
  const auto exp1 = BusyTimeDistribution::MakeExponential(1.0);
  EXPECT_EQ(CodeOf([&] {
              SolveZeta(LeakageModel::MakeSyntheticExp(1.0), exp1, 0.0);
            }),
            ErrorCode::kInfeasibleBudget);
  EXPECT_EQ(CodeOf([&] { SolveZeta(LeakageModel::MakeWiener(1.0), exp1, 1.0); }),
            ErrorCode::kInfeasibleBudget);
  EXPECT_EQ(CodeOf([&] { SolveZeta(kOU, exp1, -1.0); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace aoi_lab
