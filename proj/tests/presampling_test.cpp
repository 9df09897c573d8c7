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
#include <vector>

#include <gtest/gtest.h>

#include "aoi_lab/busy_time.hpp"
#include "aoi_lab/errors.hpp"
#include "aoi_lab/params.hpp"
#include "aoi_lab/presampling.hpp"
#include "aoi_lab/sim.hpp"

namespace aoi_lab {
namespace {

PolicyContext Ctx(BusyTimeDistribution busy, AgePenalty g, double zeta = 0.0) {
  return PolicyContext{std::move(busy), zeta, g};
}

const auto kDet1 = BusyTimeDistribution::MakeDeterministic(1.0);
const auto kExp1 = BusyTimeDistribution::MakeExponential(1.0);

TEST(GBar, Examples) {
  EXPECT_DOUBLE_EQ(GBar(Ctx(BusyTimeDistribution::MakeDeterministic(3.0),
                            AgePenalty::MakeLinear()),
                        1.0, 2.0),
                   6.0);
  EXPECT_DOUBLE_EQ(GBar(Ctx(kDet1, AgePenalty::MakePower(2.0)), 0.0, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(GBar(Ctx(kExp1, AgePenalty::MakeLinear()), 0.5, 0.25), 1.75);
  // Same value through the quadrature path (power 1 is not special-cased).
  EXPECT_NEAR(GBar(Ctx(kExp1, AgePenalty::MakePower(1.0)), 0.5, 0.25), 1.75,
              1e-11);
  // The post-sampling wait shifts the busy time.
  EXPECT_DOUBLE_EQ(GBar(Ctx(kExp1, AgePenalty::MakeLinear(), 0.5), 0.0, 0.0),
                   1.5);
}

TEST(GBar, DivergentPenalty) {
  try {
    GBar(Ctx(kExp1, AgePenalty::MakeExponential(1.0)), 0.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergentPenalty);
  }
}

TEST(InverseG, ClosedForms) {
  const auto lin = Ctx(kDet1, AgePenalty::MakeLinear());
  EXPECT_DOUBLE_EQ(InverseG(lin, 0.0, 1.5), 0.5);
  EXPECT_DOUBLE_EQ(InverseG(lin, 2.0, 1.5), -1.5);
  EXPECT_DOUBLE_EQ(InverseG(Ctx(kDet1, AgePenalty::MakePower(2.0)), 0.0, 4.0),
                   1.0);
}

TEST(InverseG, QuadraturePath) {
  // E[(s + b)^2] = s^2 + 2 s + 2 for b ~ exp(1); equals 10 at s = 2.
  const auto sq = Ctx(kExp1, AgePenalty::MakePower(2.0));
  EXPECT_NEAR(InverseG(sq, 0.5, 10.0), 1.5, 1e-9);
  // E[e^{0.5 (s + b)}] - 1 = 2 e^{s / 2} - 1 for b ~ exp(1).
  const auto ex = Ctx(kExp1, AgePenalty::MakeExponential(0.5));
  EXPECT_NEAR(InverseG(ex, 0.0, 2.0 * std::exp(1.0) - 1.0), 2.0, 1e-9);
  EXPECT_THROW(InverseG(sq, 0.0, 1.0), Error);
}

TEST(WaitTime, Examples) {
  ThresholdPolicy lin = MakeThresholdPolicy(Ctx(kDet1, AgePenalty::MakeLinear()), 1.5);
  EXPECT_DOUBLE_EQ(WaitTime(lin, 2.0), 0.0);
  EXPECT_NEAR(WaitTime(lin, 0.2), 0.3, 1e-15);
  ThresholdPolicy sq =
      MakeThresholdPolicy(Ctx(kDet1, AgePenalty::MakePower(2.0)), 4.0);
  EXPECT_NEAR(WaitTime(sq, 0.0), 1.0, 1e-9);
}

// Oracle for a deterministic busy time c and linear penalty: each epoch
// starts at age c, waits w and lasts w + c, so the average age is
// c + (w + c) / 2. The optimal average cost equals gamma*.
double DeterministicLinearGridOracle(double c) {
  double best = INFINITY;
  for (int i = 0; i <= 100'000; ++i) {
    const double w = 5.0 * c * i / 100'000;
    best = std::min(best, c + 0.5 * (w + c));
  }
  return best;
}

TEST(SolveGamma, DeterministicLinear) {
  for (double c : {0.5, 1.0, 3.0}) {
    const auto policy = SolveGamma(
        Ctx(BusyTimeDistribution::MakeDeterministic(c), AgePenalty::MakeLinear()));
    EXPECT_NEAR(policy.gamma, 1.5 * c, 1e-8);
    EXPECT_NEAR(policy.gamma, DeterministicLinearGridOracle(c), 1e-8);
    EXPECT_LE(policy.residual, 1e-8);
    for (double age = c; age < 10 * c; age += 0.1) {
      EXPECT_EQ(WaitTime(policy, age), 0.0);
    }
  }
}

TEST(SolveGamma, ResidualForEveryPenaltyAndDistribution) {
  const std::vector<BusyTimeDistribution> dists = {
      kExp1, BusyTimeDistribution::MakeExponential(10.0), kDet1,
      BusyTimeDistribution::MakeEmpirical({0.1, 0.2, 2.5, 4.0})};
  const std::vector<AgePenalty> penalties = {
      AgePenalty::MakeLinear(), AgePenalty::MakePower(2.0),
      AgePenalty::MakeExponential(0.25)};
  for (const auto& d : dists) {
    for (const auto& g : penalties) {
      for (double zeta : {0.0, 0.3}) {
        const auto policy = SolveGamma(Ctx(d, g, zeta));
        EXPECT_LE(policy.residual, 1e-8) << d.Describe() << " " << g.Describe();
        EXPECT_LE(std::abs(GammaEquation(policy.context, policy.gamma)), 1e-8);
        EXPECT_GT(policy.gamma, 0.0);
      }
    }
  }
}

TEST(SolveGamma, PolicyIsMonotoneInStartingAge) {
  for (const auto& g : {AgePenalty::MakeLinear(), AgePenalty::MakePower(2.0),
                        AgePenalty::MakeExponential(0.25)}) {
    const auto policy = SolveGamma(
        Ctx(BusyTimeDistribution::MakeEmpirical({0.05, 0.1, 3.0}), g, 0.0));
    double prev = INFINITY;
    for (double age = 0.0; age < 10.0; age += 0.01) {
      const double w = WaitTime(policy, age);
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, prev);
      prev = w;
    }
  }
}

// Waiting can help when busy times are highly variable.
TEST(SolveGamma, WaitingBeatsZeroWaitForBimodalBusyTimes) {
  SystemParams params;
  params.busy = BusyTimeDistribution::MakeEmpirical({0.01, 0.01, 0.01, 5.0});
  const auto policy = SolveGamma(Ctx(params.busy, params.penalty));
  EXPECT_GT(policy.age_threshold, 0.0);
  const auto waited = Simulate(params, 0.0, &policy, 1'000'000, 11, 1000);
  const auto zero = Simulate(params, 0.0, nullptr, 1'000'000, 11, 1000);
  EXPECT_LT(waited.avg_penalty, zero.avg_penalty);
  // gamma* is the optimal long-run average penalty.
  EXPECT_NEAR(waited.avg_penalty, policy.gamma, 4 * waited.avg_penalty_se);
}

TEST(SolveGamma, NoWorseThanZeroWaitInSimulation) {
  SystemParams params;
  params.busy = kExp1;
  for (const auto& g : {AgePenalty::MakeLinear(), AgePenalty::MakePower(2.0),
                        AgePenalty::MakeExponential(0.25)}) {
    params.penalty = g;
    const auto policy = SolveGamma(Ctx(kExp1, g));
    const auto waited = Simulate(params, 0.0, &policy, 500'000, 3, 1000);
    const auto zero = Simulate(params, 0.0, nullptr, 500'000, 3, 1000);
    EXPECT_LE(waited.avg_penalty, zero.avg_penalty + 3 * zero.avg_penalty_se)
        << g.Describe();
  }
}

}  // namespace
}  // namespace aoi_lab
