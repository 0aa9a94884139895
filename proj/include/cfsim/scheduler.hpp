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
// Drift-plus-penalty scheduling: virtual queues, closed-form arrival
// solvers for proportional-fair and hard-fairness utilities, max-weight
// top-K activation, and the random / round-robin / max-sum-rate
// baselines.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsim/rng.hpp"

namespace cfsim {

enum class Policy { HFS, PFS, RANDOM, ROUND_ROBIN, MAX_SUM_RATE };

inline const char *policy_name(Policy p) {
    switch (p) {
    case Policy::HFS: return "HFS";
    case Policy::PFS: return "PFS";
    case Policy::RANDOM: return "RANDOM";
    case Policy::ROUND_ROBIN: return "ROUND_ROBIN";
    case Policy::MAX_SUM_RATE: return "MAX_SUM_RATE";
    }
    return "?";
}

inline Policy parse_policy(const std::string &name) {
    if (name == "HFS") return Policy::HFS;
    if (name == "PFS") return Policy::PFS;
    if (name == "RANDOM") return Policy::RANDOM;
    if (name == "ROUND_ROBIN") return Policy::ROUND_ROBIN;
    if (name == "MAX_SUM_RATE") return Policy::MAX_SUM_RATE;
    throw std::invalid_argument("unknown policy: " + name);
}

inline bool is_fairness_policy(Policy p) { return p == Policy::HFS || p == Policy::PFS; }

// Proportional fairness: per-UE maximizer of V*log(a) - Q*a on [0, A_max].
// An empty queue leaves the log term unopposed, so the box bound binds.
inline std::vector<double> arrivals_pfs(const std::vector<double> &queues, double v, double a_max) {
    if (v <= 0.0 || a_max <= 0.0) throw std::invalid_argument("arrivals_pfs: v and a_max must be positive");
    std::vector<double> a(queues.size());
    for (std::size_t k = 0; k < queues.size(); ++k)
        a[k] = queues[k] > 0.0 ? std::min(v / queues[k], a_max) : a_max;
    return a;
}

// Hard fairness: the common arrival is A_max when V strictly exceeds the
// total queue backlog and zero otherwise.
inline std::vector<double> arrivals_hfs(const std::vector<double> &queues, double v, double a_max) {
    if (v <= 0.0 || a_max <= 0.0) throw std::invalid_argument("arrivals_hfs: v and a_max must be positive");
    const double total = std::accumulate(queues.begin(), queues.end(), 0.0);
    return std::vector<double>(queues.size(), v > total ? a_max : 0.0);
}

// Max-weight activation: the k_act eligible UEs with the largest
// Q_k * E[R_k], ties to the lower index.
inline std::vector<std::uint8_t> select_topk(const std::vector<double> &queues,
                                             const std::vector<double> &expected_service, int k_act,
                                             const std::vector<std::uint8_t> &eligible) {
    if (k_act < 1) throw std::invalid_argument("select_topk: k_act must be positive");
    const int k_tot = static_cast<int>(queues.size());
    std::vector<int> order;
    for (int k = 0; k < k_tot; ++k)
        if (eligible[k]) order.push_back(k);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double pa = queues[a] * expected_service[a];
        const double pb = queues[b] * expected_service[b];
        if (pa != pb) return pa > pb;
        return a < b;
    });
    if (static_cast<int>(order.size()) > k_act) order.resize(k_act);
    std::vector<std::uint8_t> x(k_tot, 0);
    for (int k : order) x[k] = 1;
    return x;
}

// Round-robin walks the full index range so each UE gets a turn at a
// fixed cadence; an uncovered UE's turn is forfeited rather than passed
// on. The cursor advance does not depend on coverage.
inline std::vector<std::uint8_t> select_round_robin(int k_tot, int k_act, int &rr_cursor,
                                                    const std::vector<std::uint8_t> &eligible) {
    std::vector<std::uint8_t> x(k_tot, 0);
    for (int i = 0; i < std::min(k_act, k_tot); ++i) {
        const int k = (rr_cursor + i) % k_tot;
        if (eligible[k]) x[k] = 1;
    }
    rr_cursor = (rr_cursor + k_act) % k_tot;
    return x;
}

// Uniform k_act-subset of the eligible UEs.
inline std::vector<std::uint8_t> select_random(int k_tot, int k_act,
                                               const std::vector<std::uint8_t> &eligible, Rng &rng) {
    std::vector<int> pool;
    for (int k = 0; k < k_tot; ++k)
        if (eligible[k]) pool.push_back(k);
    std::vector<int> picked;
    std::sample(pool.begin(), pool.end(), std::back_inserter(picked), static_cast<std::size_t>(k_act),
                rng);
    std::vector<std::uint8_t> x(k_tot, 0);
    for (int k : picked) x[k] = 1;
    return x;
}

// Greedy throughput: top k_act eligible UEs by expected service rate.
inline std::vector<std::uint8_t> select_max_sum_rate(const std::vector<double> &expected_service,
                                                     int k_act,
                                                     const std::vector<std::uint8_t> &eligible) {
    const int k_tot = static_cast<int>(expected_service.size());
    std::vector<int> order;
    for (int k = 0; k < k_tot; ++k)
        if (eligible[k]) order.push_back(k);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (expected_service[a] != expected_service[b]) return expected_service[a] > expected_service[b];
        return a < b;
    });
    if (static_cast<int>(order.size()) > k_act) order.resize(k_act);
    std::vector<std::uint8_t> x(k_tot, 0);
    for (int k : order) x[k] = 1;
    return x;
}

// Lyapunov virtual-queue recursion, applied to every UE whether active
// or not (idle UEs simply have zero service).
inline void update_queues(std::vector<double> &queues, const std::vector<double> &service,
                          const std::vector<double> &arrivals) {
    for (std::size_t k = 0; k < queues.size(); ++k)
        queues[k] = std::max(queues[k] - service[k], 0.0) + arrivals[k];
}

// Mutable per-policy scheduler state owned by the engine loop.
struct SchedulerState {
    Policy policy = Policy::HFS;
    double v = 0.0;
    double a_max = 0.0;
    std::vector<double> queues;   // virtual queues, zero for uncovered UEs
    std::vector<double> arrivals; // last computed arrival vector
    int rr_cursor = 0;

    SchedulerState() = default;
    SchedulerState(Policy p, int k_tot, double v_param, double a_max_param)
        : policy(p), v(v_param), a_max(a_max_param), queues(k_tot, 0.0), arrivals(k_tot, 0.0) {}

    // Computes arrivals (fairness policies only) and the activity vector
    // for the next slot.
    std::vector<std::uint8_t> decide(const std::vector<double> &expected_service, int k_act,
                                     const std::vector<std::uint8_t> &eligible, Rng &rng) {
        const int k_tot = static_cast<int>(queues.size());
        switch (policy) {
        case Policy::HFS:
        case Policy::PFS: {
            arrivals = policy == Policy::PFS ? arrivals_pfs(queues, v, a_max)
                                             : arrivals_hfs(queues, v, a_max);
            for (int k = 0; k < k_tot; ++k)
                if (!eligible[k]) arrivals[k] = 0.0; // uncovered UEs hold no queue
            return select_topk(queues, expected_service, k_act, eligible);
        }
        case Policy::RANDOM:
            return select_random(k_tot, k_act, eligible, rng);
        case Policy::ROUND_ROBIN:
            return select_round_robin(k_tot, k_act, rr_cursor, eligible);
        case Policy::MAX_SUM_RATE:
            return select_max_sum_rate(expected_service, k_act, eligible);
        }
        return std::vector<std::uint8_t>(k_tot, 0);
    }

    // Queue update after the slot's realized service; baselines keep no
    // queues, so this is a no-op for them.
    void settle(const std::vector<double> &service) {
        if (is_fairness_policy(policy)) update_queues(queues, service, arrivals);
    }
};

} // namespace cfsim
