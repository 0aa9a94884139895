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
// Per-slot pipeline orchestration (schedule, cluster/pilot, estimate,
// combine, SINR, service, queue and memory updates), steady-state
// detection, multi-layout experiment runner, and summary metrics.

#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cfsim/association.hpp"
#include "cfsim/channel.hpp"
#include "cfsim/config.hpp"
#include "cfsim/geometry.hpp"
#include "cfsim/ratealloc.hpp"
#include "cfsim/receiver.hpp"
#include "cfsim/scheduler.hpp"

namespace cfsim {

// ---------------------------------------------------------------------------
// Steady-state detection
// ---------------------------------------------------------------------------

// Windowed relative-drift criterion: for every UE, the mean queue over the
// last `window` slots and over the preceding `window` slots must agree to
// within tol * (1 + latest mean).
inline bool detect_steady_state(const std::vector<std::vector<double>> &history, int window,
                                double tol) {
    const int n = static_cast<int>(history.size());
    if (n < 2 * window) throw std::invalid_argument("detect_steady_state: need 2*window slots");
    const std::size_t k_tot = history.front().size();
    for (std::size_t k = 0; k < k_tot; ++k) {
        double last = 0.0, prev = 0.0;
        for (int t = n - window; t < n; ++t) last += history[t][k];
        for (int t = n - 2 * window; t < n - window; ++t) prev += history[t][k];
        last /= window;
        prev /= window;
        if (std::fabs(last - prev) >= tol * (1.0 + last)) return false;
    }
    return true;
}

// Incremental equivalent of detect_steady_state over a rolling window,
// O(K) per slot instead of O(K * window).
class SteadyStateTracker {
  public:
    SteadyStateTracker(int k_tot, int window, double tol)
        : window_(window), tol_(tol), sum_last_(k_tot, 0.0), sum_prev_(k_tot, 0.0) {
        if (window < 1) throw std::invalid_argument("SteadyStateTracker: window must be positive");
    }

    void push(const std::vector<double> &queues) {
        recent_.push_back(queues);
        for (std::size_t k = 0; k < queues.size(); ++k) sum_last_[k] += queues[k];
        if (static_cast<int>(recent_.size()) > window_) {
            const std::vector<double> &crossing = recent_[recent_.size() - window_ - 1];
            for (std::size_t k = 0; k < crossing.size(); ++k) {
                sum_last_[k] -= crossing[k];
                sum_prev_[k] += crossing[k];
            }
        }
        if (static_cast<int>(recent_.size()) > 2 * window_) {
            const std::vector<double> &leaving = recent_.front();
            for (std::size_t k = 0; k < leaving.size(); ++k) sum_prev_[k] -= leaving[k];
            recent_.pop_front();
        }
    }

    bool ready() const { return static_cast<int>(recent_.size()) == 2 * window_; }

    bool steady() const {
        if (!ready()) return false;
        for (std::size_t k = 0; k < sum_last_.size(); ++k) {
            const double last = sum_last_[k] / window_;
            const double prev = sum_prev_[k] / window_;
            if (std::fabs(last - prev) >= tol_ * (1.0 + last)) return false;
        }
        return true;
    }

  private:
    int window_;
    double tol_;
    std::deque<std::vector<double>> recent_;
    std::vector<double> sum_last_;
    std::vector<double> sum_prev_;
};

// ---------------------------------------------------------------------------
// Single-layout simulation
// ---------------------------------------------------------------------------

struct SlotResult {
    int slot = 0;
    std::vector<std::uint8_t> scheduled;
    std::vector<double> allocated; // rate the UE transmitted at (0 if idle)
    std::vector<double> mi;        // realized mutual information (0 if idle)
    std::vector<double> service;   // realized service rate R_k(t)
    std::vector<double> queues;    // virtual queues after the update
};

struct LayoutResult {
    int layout = 0;
    std::vector<double> throughput;     // per-UE time-average service, bit/s/Hz
    std::vector<std::uint8_t> covered;  // per-UE coverage flag
    int slots_run = 0;                  // main-loop slots executed
    bool steady = false;
    int steady_slot = 0;                // slots to detection; slots_run if never detected
    double a_max = 0.0;                 // resolved arrival bound
    double snr = 0.0;
    int uncovered_count = 0;
    int never_sampled_count = 0;        // covered UEs without start-up MI samples
    int pilot_fallbacks = 0;            // contamination-score pilot placements
    int weight_fallbacks = 0;           // zero-gain combining weight fallbacks
    std::vector<double> final_rate;         // allocated rate at the end of the run
    std::vector<double> final_probability;  // success probability of that rate
    std::vector<int> sample_count;          // MI samples held per UE at the end
    std::vector<std::vector<double>> queue_trace; // per-slot queues when tracing
};

// One network layout: fixed RU grid, one UE drop, static large-scale state,
// and the slot loop. Copyable value type; all randomness flows through the
// owned per-layout generator.
class LayoutSim {
  public:
    LayoutSim(const SimConfig &cfg, int layout_index)
        : cfg_(cfg), layout_(layout_index), rng_(make_layout_rng(cfg.base_seed, layout_index)) {
        topo_.area_side = cfg.area_side;
        topo_.ru_positions = place_rus(cfg.grid_rows, cfg.grid_cols, cfg.area_side);
        std::uniform_real_distribution<double> coord(0.0, cfg.area_side);
        topo_.ue_positions.resize(cfg.k_tot);
        for (int k = 0; k < cfg.k_tot; ++k) {
            const double x = coord(rng_);
            const double y = coord(rng_);
            topo_.ue_positions[k] = {x, y};
        }
        ls_ = make_large_scale(topo_, cfg.antennas, rng_);
        sup_ = make_supports(topo_, cfg.antennas, cfg.delta);
        graph_ = form_clusters(ls_.lsfc, cfg.eta, cfg.q_max, cfg.antennas, ls_.snr);
        memory_ = RateMemory(cfg.k_tot, cfg.mem_window);
    }

    const SimConfig &config() const { return cfg_; }
    const NetworkTopology &topology() const { return topo_; }
    const LargeScaleState &large_scale() const { return ls_; }
    const AssociationGraph &graph() const { return graph_; }
    const RateMemory &memory() const { return memory_; }
    const SchedulerState &scheduler() const { return sched_; }
    double a_max() const { return a_max_; }
    bool startup_done() const { return startup_done_; }
    int pilot_fallbacks() const { return pilot_fallbacks_; }
    int weight_fallbacks() const { return weight_fallbacks_; }

    // Start-up phase: uniformly random activation fills the MI memories,
    // then the arrival bound and scheduler state are initialized.
    void run_startup() {
        for (int t = 0; t < cfg_.n_init; ++t) {
            const std::vector<std::uint8_t> x =
                select_random(cfg_.k_tot, cfg_.k_act, graph_.covered, rng_);
            simulate_physics(x);
            for (int k = 0; k < cfg_.k_tot; ++k)
                if (x[k]) memory_.record(k, mi_[k]);
        }
        double best_rate = 0.0;
        for (int k = 0; k < cfg_.k_tot; ++k) best_rate = std::max(best_rate, memory_.allocated_rate(k));
        const double overhead = 1.0 - static_cast<double>(cfg_.tau_p) / cfg_.t_dim;
        a_max_ = cfg_.a_max > 0.0 ? cfg_.a_max : overhead * best_rate;
        if (a_max_ <= 0.0) a_max_ = 1.0; // degenerate start-up with no usable samples
        sched_ = SchedulerState(cfg_.policy, cfg_.k_tot, cfg_.v_param, a_max_);
        startup_done_ = true;
    }

    // One main-loop slot: decision, physics, service, queue and memory
    // updates, in that order.
    SlotResult run_slot(int slot_index) {
        if (!startup_done_) throw std::logic_error("run_slot: start-up phase not completed");
        SlotResult r;
        r.slot = slot_index;
        r.scheduled = sched_.decide(memory_.expected_service(), cfg_.k_act, graph_.covered, rng_);
        simulate_physics(r.scheduled);
        r.allocated.assign(cfg_.k_tot, 0.0);
        r.mi = mi_;
        r.service.assign(cfg_.k_tot, 0.0);
        for (int k = 0; k < cfg_.k_tot; ++k) {
            if (!r.scheduled[k]) continue;
            r.allocated[k] = memory_.allocated_rate(k);
            r.service[k] = realize_service(r.allocated[k], mi_[k], true, cfg_.tau_p, cfg_.t_dim);
        }
        sched_.settle(r.service);
        for (int k = 0; k < cfg_.k_tot; ++k)
            if (r.scheduled[k]) memory_.record(k, mi_[k]);
        r.queues = sched_.queues;
        return r;
    }

    // Full run: start-up, then main loop until steady state (when enabled)
    // or the slot limit. Throughput averages exclude the start-up phase.
    LayoutResult run(bool trace_queues = false) {
        run_startup();
        LayoutResult out;
        out.layout = layout_;
        out.covered = graph_.covered;
        out.a_max = a_max_;
        out.snr = ls_.snr;
        for (int k = 0; k < cfg_.k_tot; ++k) {
            if (!graph_.covered[k])
                ++out.uncovered_count;
            else if (memory_.count(k) == 0)
                ++out.never_sampled_count;
        }

        std::vector<double> service_sum(cfg_.k_tot, 0.0);
        SteadyStateTracker tracker(cfg_.k_tot, cfg_.steady_window, cfg_.steady_tol);
        int t = 0;
        for (; t < cfg_.t_s_limit; ++t) {
            const SlotResult slot = run_slot(t);
            for (int k = 0; k < cfg_.k_tot; ++k) service_sum[k] += slot.service[k];
            if (trace_queues) out.queue_trace.push_back(slot.queues);
            if (cfg_.stop_at_steady) {
                tracker.push(slot.queues);
                if (tracker.steady()) {
                    ++t;
                    out.steady = true;
                    break;
                }
            }
        }
        out.slots_run = t;
        out.steady_slot = t;
        out.throughput.resize(cfg_.k_tot);
        for (int k = 0; k < cfg_.k_tot; ++k) out.throughput[k] = service_sum[k] / t;
        out.final_rate.resize(cfg_.k_tot);
        out.final_probability.resize(cfg_.k_tot);
        out.sample_count.resize(cfg_.k_tot);
        for (int k = 0; k < cfg_.k_tot; ++k) {
            out.final_rate[k] = memory_.allocated_rate(k);
            out.final_probability[k] = memory_.success_probability(k);
            out.sample_count[k] = memory_.count(k);
        }
        out.pilot_fallbacks = pilot_fallbacks_;
        out.weight_fallbacks = weight_fallbacks_;
        return out;
    }

  private:
    // Shared physics for start-up and main slots: pilots, channel,
    // estimates, receivers, and per-UE mutual information for the given
    // activity vector. Results land in mi_.
    void simulate_physics(const std::vector<std::uint8_t> &x) {
        active_list_.clear();
        for (int k = 0; k < cfg_.k_tot; ++k)
            if (x[k]) active_list_.push_back(k);
        const PilotAssignment pilots =
            assign_pilots(graph_, sup_, ls_.lsfc, active_list_, cfg_.tau_p);
        pilot_fallbacks_ += static_cast<int>(pilots.fallbacks.size());
        realize_channel_into(h_, ls_, sup_, x, rng_);
        ChannelRealization chan;
        chan.active = x;
        chan.h.swap(h_);
        const ChannelEstimates est =
            estimate_channels(chan, pilots, graph_, sup_, ls_.snr, cfg_.tau_p, rng_);
        const ReceiverState rx = build_receivers(est, graph_, active_list_, ls_.snr);
        weight_fallbacks_ += rx.weight_fallbacks;
        mi_.assign(cfg_.k_tot, 0.0);
        for (std::size_t i = 0; i < rx.ue.size(); ++i) {
            const SinrMi s = sinr_and_mi(rx.aggregate[i], chan.h, rx.ue[i], ls_.snr, chan.active);
            mi_[rx.ue[i]] = s.mi;
        }
        chan.h.swap(h_);
    }

    SimConfig cfg_;
    int layout_ = 0;
    Rng rng_;
    NetworkTopology topo_;
    LargeScaleState ls_;
    AngularSupportTable sup_;
    AssociationGraph graph_;
    RateMemory memory_;
    SchedulerState sched_;
    double a_max_ = 0.0;
    bool startup_done_ = false;
    int pilot_fallbacks_ = 0;
    int weight_fallbacks_ = 0;
    Eigen::MatrixXcd h_;
    std::vector<double> mi_;
    std::vector<int> active_list_;
};

// ---------------------------------------------------------------------------
// Multi-layout experiments
// ---------------------------------------------------------------------------

struct ExperimentResult {
    std::vector<LayoutResult> layouts;
};

// Runs the configured number of independent layouts, optionally on
// parallel workers. Layout i always uses the stream derived from
// (base_seed, i) and results are aggregated in layout order, so the
// outcome does not depend on the worker count.
inline ExperimentResult run_experiment(const SimConfig &cfg, bool trace_queues = false) {
    const auto problems = cfg.validate();
    if (!problems.empty()) throw std::invalid_argument("run_experiment: " + problems.front());
    ExperimentResult result;
    result.layouts.resize(cfg.n_layouts);
    int n_workers = cfg.n_workers > 0 ? cfg.n_workers
                                      : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = std::min(n_workers, cfg.n_layouts);
    auto work = [&](int worker) {
        for (int i = worker; i < cfg.n_layouts; i += n_workers) {
            LayoutSim sim(cfg, i);
            result.layouts[i] = sim.run(trace_queues);
        }
    };
    if (n_workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) threads.emplace_back(work, w);
        for (std::thread &th : threads) th.join();
    }
    return result;
}

// ---------------------------------------------------------------------------
// Summary metrics
// ---------------------------------------------------------------------------

// Nearest-rank percentile of a sample vector.
inline double percentile(std::vector<double> values, double pct) {
    if (values.empty()) throw std::invalid_argument("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const int n = static_cast<int>(values.size());
    int rank = static_cast<int>(std::ceil(pct / 100.0 * n));
    rank = std::clamp(rank, 1, n);
    return values[rank - 1];
}

struct MetricsSummary {
    double sum_throughput = 0.0; // mean over layouts of the per-layout sum
    double sum_log = 0.0;        // mean over layouts of the floored sum-log
    double pct10 = 0.0;          // pooled 10th percentile over covered UEs
    double min_throughput = 0.0; // pooled minimum over covered UEs
    double mean_slots_to_steady = 0.0;
    int zero_count = 0;    // covered UEs with exactly zero throughput
    int floored_count = 0; // covered UEs below the sum-log floor
    int uncovered_count = 0;
    int n_covered = 0;
    int n_ue = 0;
};

// Distribution statistics pool the covered UEs of every layout; uncovered
// UEs are counted separately (they have zero throughput by construction).
// The sum-log follows the per-layout full-population sum with the
// configured floor substituted for values below it.
inline MetricsSummary metrics(const ExperimentResult &result, double sumlog_floor) {
    if (result.layouts.empty()) throw std::invalid_argument("metrics: no layouts");
    MetricsSummary s;
    std::vector<double> pooled;
    double steady_sum = 0.0;
    for (const LayoutResult &lay : result.layouts) {
        double sum = 0.0;
        double sum_log = 0.0;
        for (std::size_t k = 0; k < lay.throughput.size(); ++k) {
            const double r = lay.throughput[k];
            sum += r;
            sum_log += std::log2(std::max(r, sumlog_floor));
            ++s.n_ue;
            if (!lay.covered[k]) {
                ++s.uncovered_count;
                continue;
            }
            ++s.n_covered;
            pooled.push_back(r);
            if (r == 0.0) ++s.zero_count;
            if (r < sumlog_floor) ++s.floored_count;
        }
        s.sum_throughput += sum;
        s.sum_log += sum_log;
        steady_sum += lay.steady_slot;
    }
    const double n_layouts = static_cast<double>(result.layouts.size());
    s.sum_throughput /= n_layouts;
    s.sum_log /= n_layouts;
    s.mean_slots_to_steady = steady_sum / n_layouts;
    s.pct10 = percentile(pooled, 10.0);
    s.min_throughput = *std::min_element(pooled.begin(), pooled.end());
    return s;
}

} // namespace cfsim
