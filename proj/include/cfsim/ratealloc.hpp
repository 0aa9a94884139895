// cfsim - uplink scheduling simulator for dense user-centric cell-free
// massive MIMO networks
// Copyright (C) 2026 The cfsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Outage-rate allocation from sliding-window mutual-information memories:
// each UE keeps the last N observed MI values and transmits at the rate
// maximizing rate times empirical success probability.

#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace cfsim {

struct AllocatedRate {
    double rate = 0.0;
    double probability = 0.0; // empirical P(MI >= rate)
};

// Maximizes s * P(MI >= s) over the distinct sample values; ties go to
// the smaller rate. Candidates outside the observed values cannot win:
// between two consecutive samples the success probability is flat, so
// raising s to the next sample only increases the objective.
inline AllocatedRate allocate_rate(const std::vector<double> &samples) {
    if (samples.empty()) throw std::runtime_error("allocate_rate: no CSI history");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    AllocatedRate best;
    best.rate = sorted.front();
    best.probability = 1.0;
    double best_objective = best.rate * best.probability;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) continue; // same candidate
        const double p = static_cast<double>(sorted.size() - i) / n;
        const double objective = sorted[i] * p;
        if (objective > best_objective) {
            best_objective = objective;
            best.rate = sorted[i];
            best.probability = p;
        }
    }
    return best;
}

// Realized service rate of one UE in one slot: zero when idle or in
// outage (allocated rate at or above the realized MI), otherwise the
// allocated rate discounted by the pilot overhead.
inline double realize_service(double rate, double mi, bool scheduled, int tau_p, int t_dim) {
    if (!scheduled) return 0.0;
    if (rate >= mi) return 0.0;
    return (1.0 - static_cast<double>(tau_p) / t_dim) * rate;
}

// Per-UE MI memories plus the rates derived from them. Recording a
// sample evicts the oldest once the window is full and refreshes the
// UE's allocated rate and expected service rate.
class RateMemory {
  public:
    RateMemory() = default;
    RateMemory(int n_ue, int capacity)
        : capacity_(capacity), samples_(n_ue), cursor_(n_ue, 0), allocated_(n_ue, 0.0),
          probability_(n_ue, 0.0), expected_(n_ue, 0.0) {
        if (capacity < 1) throw std::invalid_argument("RateMemory: capacity must be positive");
    }

    int capacity() const { return capacity_; }
    int count(int ue) const { return static_cast<int>(samples_[ue].size()); }
    const std::vector<double> &samples(int ue) const { return samples_[ue]; }
    double allocated_rate(int ue) const { return allocated_[ue]; }
    double success_probability(int ue) const { return probability_[ue]; }
    double expected_service(int ue) const { return expected_[ue]; }
    const std::vector<double> &expected_service() const { return expected_; }

    void record(int ue, double mi) {
        std::vector<double> &buf = samples_[ue];
        if (static_cast<int>(buf.size()) < capacity_) {
            buf.push_back(mi);
        } else {
            buf[cursor_[ue]] = mi;
            cursor_[ue] = (cursor_[ue] + 1) % capacity_;
        }
        const AllocatedRate a = allocate_rate(buf);
        allocated_[ue] = a.rate;
        probability_[ue] = a.probability;
        expected_[ue] = a.rate * a.probability;
    }

  private:
    int capacity_ = 0;
    std::vector<std::vector<double>> samples_;
    std::vector<int> cursor_; // next slot to overwrite once full
    std::vector<double> allocated_;
    std::vector<double> probability_;
    std::vector<double> expected_;
};

} // namespace cfsim
