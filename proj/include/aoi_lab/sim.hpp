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
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <vector>

#include "aoi_lab/errors.hpp"
#include "aoi_lab/params.hpp"
#include "aoi_lab/presampling.hpp"
#include "aoi_lab/random.hpp"

namespace aoi_lab {

struct EpochRecord {
  std::uint64_t n_samples = 0;  // R_i
  int n_attempts_final = 0;     // psi_i
  double pre_wait = 0.0;
  double length = 0.0;
  double starting_age = 0.0;
  double delivered_age = 0.0;  // zeta + busy times of the delivered sample
  double penalty_integral = 0.0;
  double busy_total = 0.0;  // every busy time drawn in the epoch
};

// One transmission attempt, in absolute simulated time.
struct TransmissionEvent {
  std::uint64_t sample = 0;  // global sample index j
  int attempt = 0;           // k, 1-based
  double sample_time = 0.0;  // S_j
  double tx_time = 0.0;      // T_{j,k}
  double busy = 0.0;         // b_{j,k}
  bool erased = false;
};

struct SimOptions {
  std::ostream* trace = nullptr;  // tab-separated, one line per epoch
  bool record_epochs = false;
  bool record_events = false;
  int batches = 30;
};

struct SimulationResult {
  double avg_penalty = 0.0;
  double avg_penalty_se = 0.0;
  double mean_peak_leakage = 0.0;
  double mean_peak_leakage_se = 0.0;
  double mean_epoch_length = 0.0;
  double mean_epoch_length_se = 0.0;
  double mean_r = 0.0;
  double mean_r_se = 0.0;
  double mean_psi = 0.0;
  double mean_psi_se = 0.0;
  std::uint64_t n_epochs = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;
  int batches = 0;
  // A threshold policy was applied with erasures; it is only optimal for an
  // error-free channel.
  bool policy_heuristic = false;
  double total_length = 0.0;  // sum of all epoch lengths, burn-in included
  double final_clock = 0.0;
  std::vector<std::uint64_t> r_counts;    // r_counts[r - 1] = #{R = r}
  std::vector<std::uint64_t> psi_counts;  // psi_counts[k - 1] = #{psi = k}
  std::vector<EpochRecord> records;       // measured epochs, if requested
  std::vector<TransmissionEvent> events;  // all epochs, if requested
};

namespace detail {

struct BatchAccumulator {
  double penalty = 0.0;
  double length = 0.0;
  double leakage = 0.0;
  double r = 0.0;
  double psi = 0.0;
  std::uint64_t count = 0;
};

inline double StandardError(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

inline void WriteTraceLine(std::ostream& out, std::uint64_t index,
                           const EpochRecord& rec) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%llu\t%llu\t%d\t%.9g\t%.9g\t%.9g\t%.9g\n",
                static_cast<unsigned long long>(index),
                static_cast<unsigned long long>(rec.n_samples),
                rec.n_attempts_final, rec.length, rec.starting_age,
                rec.delivered_age, rec.penalty_integral);
  out << buf;
}

}  // namespace detail

// Epoch-by-epoch simulation of generate-at-will updating over an erasure
// channel. Each epoch applies the pre-sampling wait w(starting age) once,
// then for every sample waits zeta and makes up to K attempts; each attempt
// occupies the channel for a fresh busy time and is erased independently
// with probability epsilon. After K erasures the sample is dropped and a new
// one is generated. The average penalty is the ratio of summed penalty
// integrals to summed epoch lengths over the measured epochs.
inline SimulationResult Simulate(const SystemParams& params, double zeta,
                                 const ThresholdPolicy* policy,
                                 std::uint64_t n_epochs, std::uint64_t seed,
                                 std::uint64_t burn_in,
                                 const SimOptions& options = {}) {
  params.Validate();
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
    throw Error(ErrorCode::kInvalidArgument,
                "post-sampling wait must be nonnegative");
  }
  if (n_epochs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one epoch");
  }
  if (options.batches < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one batch");
  }
  constexpr std::uint64_t kMaxSamplesPerEpoch = 1'000'000'000ULL;

  RandomSource rng(seed);
  const int k_max = params.k_max;
  const double eps = params.epsilon;

  SimulationResult result;
  result.n_epochs = n_epochs;
  result.burn_in = burn_in;
  result.seed = seed;
  result.policy_heuristic = policy != nullptr && eps > 0.0;
  result.psi_counts.assign(static_cast<std::size_t>(k_max), 0);
  const std::uint64_t n_batches =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(options.batches),
                              n_epochs);
  result.batches = static_cast<int>(n_batches);
  std::vector<detail::BatchAccumulator> batch(n_batches);

  // Virtual delivery preceding the first epoch.
  double starting_age = 0.0;
  for (bool delivered = false; !delivered;) {
    starting_age = zeta;
    for (int k = 1; k <= k_max; ++k) {
      starting_age += params.busy.Sample(rng);
      if (!rng.Bernoulli(eps)) {
        delivered = true;
        break;
      }
    }
  }

  double clock = 0.0;
  double sum_length = 0.0;
  // Peak leakage is accumulated relative to the first measured value so a
  // constant sequence averages to that value exactly.
  std::optional<double> leakage_ref;
  std::uint64_t sample_index = 0;
  const std::uint64_t total_epochs = burn_in + n_epochs;

  for (std::uint64_t epoch = 0; epoch < total_epochs; ++epoch) {
    EpochRecord rec;
    rec.starting_age = starting_age;
    rec.pre_wait = policy != nullptr ? WaitTime(*policy, starting_age) : 0.0;
    double offset = rec.pre_wait;
    double sample_elapsed = 0.0;
    bool delivered = false;
    while (!delivered) {
      if (++rec.n_samples > kMaxSamplesPerEpoch) {
        throw Error(ErrorCode::kOverflow,
                    "epoch exceeded 1e9 samples without a delivery");
      }
      const double sample_time = offset;
      offset += zeta;
      sample_elapsed = zeta;
      for (int k = 1; k <= k_max; ++k) {
        const double tx_time = offset;
        const double b = params.busy.Sample(rng);
        const bool erased = rng.Bernoulli(eps);
        offset += b;
        sample_elapsed += b;
        rec.busy_total += b;
        if (options.record_events) {
          result.events.push_back({sample_index, k, clock + sample_time,
                                   clock + tx_time, b, erased});
        }
        if (!erased) {
          rec.n_attempts_final = k;
          delivered = true;
          break;
        }
      }
      ++sample_index;
    }
    rec.length = offset;
    rec.delivered_age = sample_elapsed;
    rec.penalty_integral = params.penalty.Integral(starting_age, rec.length);

    clock += rec.length;
    sum_length += rec.length;
    starting_age = rec.delivered_age;

    if (epoch < burn_in) continue;
    const std::uint64_t measured = epoch - burn_in;
    auto& acc = batch[measured * n_batches / n_epochs];
    acc.penalty += rec.penalty_integral;
    acc.length += rec.length;
    const double leak = params.leakage(rec.delivered_age);
    if (!leakage_ref) leakage_ref = leak;
    acc.leakage += leak - *leakage_ref;
    acc.r += static_cast<double>(rec.n_samples);
    acc.psi += rec.n_attempts_final;
    ++acc.count;
    if (rec.n_samples > result.r_counts.size()) {
      result.r_counts.resize(rec.n_samples, 0);
    }
    ++result.r_counts[rec.n_samples - 1];
    ++result.psi_counts[static_cast<std::size_t>(rec.n_attempts_final - 1)];
    if (options.trace != nullptr) {
      detail::WriteTraceLine(*options.trace, measured, rec);
    }
    if (options.record_epochs) result.records.push_back(rec);
  }

  detail::BatchAccumulator total;
  std::vector<double> ratio, leak, len, r, psi;
  for (const auto& acc : batch) {
    total.penalty += acc.penalty;
    total.length += acc.length;
    total.leakage += acc.leakage;
    total.r += acc.r;
    total.psi += acc.psi;
    total.count += acc.count;
    const double n = static_cast<double>(acc.count);
    ratio.push_back(acc.penalty / acc.length);
    leak.push_back(*leakage_ref + acc.leakage / n);
    len.push_back(acc.length / n);
    r.push_back(acc.r / n);
    psi.push_back(acc.psi / n);
  }
  const double n = static_cast<double>(total.count);
  result.avg_penalty = total.penalty / total.length;
  result.mean_peak_leakage = *leakage_ref + total.leakage / n;
  result.mean_epoch_length = total.length / n;
  result.mean_r = total.r / n;
  result.mean_psi = total.psi / n;
  result.avg_penalty_se = detail::StandardError(ratio);
  result.mean_peak_leakage_se = detail::StandardError(leak);
  result.mean_epoch_length_se = detail::StandardError(len);
  result.mean_r_se = detail::StandardError(r);
  result.mean_psi_se = detail::StandardError(psi);
  result.total_length = sum_length;
  result.final_clock = clock;
  return result;
}

struct FeasibilityVerdict {
  bool satisfied = false;
  double slack = 0.0;  // delta - mean_peak_leakage
  double bound = 0.0;  // delta + 3 standard errors
};

inline FeasibilityVerdict LeakageFeasibility(const SimulationResult& result,
                                             double delta) {
  FeasibilityVerdict v;
  v.bound = delta + 3.0 * result.mean_peak_leakage_se;
  v.satisfied = result.mean_peak_leakage <= v.bound;
  v.slack = delta - result.mean_peak_leakage;
  return v;
}

}  // namespace aoi_lab
