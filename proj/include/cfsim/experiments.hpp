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
// The two canonical experiment recipes (all-active load sweep and
// scheduler comparison) and their CSV / JSON serialization.

#pragma once

#include <ctime>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "cfsim/engine.hpp"
#include "cfsim/io.hpp"
#include "cfsim/version.hpp"

namespace cfsim {

// ---------------------------------------------------------------------------
// Load sweep: all-active network at varying population sizes
// ---------------------------------------------------------------------------

struct SweepResult {
    struct Entry {
        int k = 0;
        int tau_p = 0;
        ExperimentResult result;
    };
    std::vector<Entry> entries;
};

// Every UE transmits in every slot (K_act = K_tot), realized by the RANDOM
// policy selecting the whole eligible population; queues play no role.
inline SimConfig sweep_entry_config(const SimConfig &base, int k, int tau_p) {
    SimConfig cfg = base;
    cfg.k_tot = k;
    cfg.k_act = k;
    cfg.tau_p = tau_p;
    cfg.policy = Policy::RANDOM;
    cfg.stop_at_steady = false;
    return cfg;
}

inline SweepResult run_load_sweep(const SimConfig &base, const std::vector<int> &k_values,
                                  const std::vector<int> &tau_values) {
    if (k_values.empty()) throw std::invalid_argument("load sweep: K list must not be empty");
    if (tau_values.empty()) throw std::invalid_argument("load sweep: tau_p list must not be empty");
    SweepResult sweep;
    for (int tau : tau_values)
        for (int k : k_values) {
            SweepResult::Entry entry;
            entry.k = k;
            entry.tau_p = tau;
            entry.result = run_experiment(sweep_entry_config(base, k, tau));
            sweep.entries.push_back(std::move(entry));
        }
    return sweep;
}

// Writes sweep_sum.csv (per-layout sum throughput) and sweep_ue.csv
// (per-UE throughput, feeding empirical CDFs); returns the file names.
inline std::vector<std::string> write_sweep_csvs(const SweepResult &sweep,
                                                 const std::filesystem::path &dir) {
    std::vector<std::string> files;

    std::ofstream sum = open_output((dir / "sweep_sum.csv").string());
    sum << "k,tau_p,layout,sum_throughput\n";
    for (const SweepResult::Entry &entry : sweep.entries)
        for (const LayoutResult &lay : entry.result.layouts) {
            double total = 0.0;
            for (double r : lay.throughput) total += r;
            sum << entry.k << ',' << entry.tau_p << ',' << lay.layout << ',' << format_double(total)
                << '\n';
        }
    files.push_back("sweep_sum.csv");

    std::ofstream ue = open_output((dir / "sweep_ue.csv").string());
    ue << "k,tau_p,layout,ue,covered,throughput\n";
    for (const SweepResult::Entry &entry : sweep.entries)
        for (const LayoutResult &lay : entry.result.layouts)
            for (std::size_t k = 0; k < lay.throughput.size(); ++k)
                ue << entry.k << ',' << entry.tau_p << ',' << lay.layout << ',' << k << ','
                   << int(lay.covered[k]) << ',' << format_double(lay.throughput[k]) << '\n';
    files.push_back("sweep_ue.csv");
    return files;
}

// ---------------------------------------------------------------------------
// Scheduler comparison
// ---------------------------------------------------------------------------

struct CompareResult {
    struct Entry {
        Policy policy = Policy::HFS;
        double v = 0.0; // 0 for baselines (no drift-plus-penalty parameter)
        ExperimentResult result;
        MetricsSummary summary;
    };
    std::vector<Entry> entries;
};

// Fairness policies run once per V value; baselines do not depend on V and
// run once each.
inline CompareResult run_compare(const SimConfig &base, const std::vector<Policy> &policies,
                                 const std::vector<double> &v_values, bool trace_queues) {
    if (policies.empty()) throw std::invalid_argument("compare: policy list must not be empty");
    if (v_values.empty()) throw std::invalid_argument("compare: V list must not be empty");
    CompareResult cmp;
    for (Policy policy : policies) {
        const std::vector<double> vs = is_fairness_policy(policy) ? v_values : std::vector<double>{0.0};
        for (double v : vs) {
            SimConfig cfg = base;
            cfg.policy = policy;
            if (v > 0.0) cfg.v_param = v;
            CompareResult::Entry entry;
            entry.policy = policy;
            entry.v = v;
            entry.result = run_experiment(cfg, trace_queues);
            entry.summary = metrics(entry.result, cfg.sumlog_floor);
            cmp.entries.push_back(std::move(entry));
        }
    }
    return cmp;
}

namespace detail {
inline std::string compare_tag(Policy policy, double v) {
    std::string tag = policy_name(policy);
    if (v > 0.0) tag += "_v" + format_double(v);
    return tag;
}
} // namespace detail

// Writes compare_ue.csv, compare_rates.csv, compare_summary.json, and one
// queue-trace CSV per entry when traces were recorded; returns the file
// names.
inline std::vector<std::string> write_compare_csvs(const CompareResult &cmp,
                                                   const std::filesystem::path &dir) {
    std::vector<std::string> files;

    std::ofstream ue = open_output((dir / "compare_ue.csv").string());
    ue << "policy,v,layout,ue,covered,throughput\n";
    for (const CompareResult::Entry &entry : cmp.entries)
        for (const LayoutResult &lay : entry.result.layouts)
            for (std::size_t k = 0; k < lay.throughput.size(); ++k)
                ue << policy_name(entry.policy) << ',' << format_double(entry.v) << ',' << lay.layout
                   << ',' << k << ',' << int(lay.covered[k]) << ','
                   << format_double(lay.throughput[k]) << '\n';
    files.push_back("compare_ue.csv");

    // End-of-run rate-memory state: allocated rate, its empirical success
    // probability, and the number of MI samples backing it.
    std::ofstream rates = open_output((dir / "compare_rates.csv").string());
    rates << "policy,v,layout,ue,samples,allocated_rate,success_probability\n";
    for (const CompareResult::Entry &entry : cmp.entries)
        for (const LayoutResult &lay : entry.result.layouts)
            for (std::size_t k = 0; k < lay.final_rate.size(); ++k)
                rates << policy_name(entry.policy) << ',' << format_double(entry.v) << ','
                      << lay.layout << ',' << k << ',' << lay.sample_count[k] << ','
                      << format_double(lay.final_rate[k]) << ','
                      << format_double(lay.final_probability[k]) << '\n';
    files.push_back("compare_rates.csv");

    nlohmann::json summary = nlohmann::json::array();
    for (const CompareResult::Entry &entry : cmp.entries) {
        nlohmann::json layouts = nlohmann::json::array();
        for (const LayoutResult &lay : entry.result.layouts)
            layouts.push_back({{"layout", lay.layout},
                               {"slots_run", lay.slots_run},
                               {"steady", lay.steady},
                               {"steady_slot", lay.steady_slot},
                               {"a_max", lay.a_max},
                               {"uncovered", lay.uncovered_count}});
        summary.push_back({{"policy", policy_name(entry.policy)},
                           {"v", entry.v},
                           {"sum_throughput", entry.summary.sum_throughput},
                           {"sum_log", entry.summary.sum_log},
                           {"pct10", entry.summary.pct10},
                           {"min_throughput", entry.summary.min_throughput},
                           {"zero_count", entry.summary.zero_count},
                           {"floored_count", entry.summary.floored_count},
                           {"uncovered_count", entry.summary.uncovered_count},
                           {"n_covered", entry.summary.n_covered},
                           {"n_ue", entry.summary.n_ue},
                           {"mean_slots_to_steady", entry.summary.mean_slots_to_steady},
                           {"layouts", layouts}});
    }
    std::ofstream js = open_output((dir / "compare_summary.json").string());
    js << summary.dump(2) << '\n';
    files.push_back("compare_summary.json");

    for (const CompareResult::Entry &entry : cmp.entries) {
        bool any_trace = false;
        for (const LayoutResult &lay : entry.result.layouts)
            if (!lay.queue_trace.empty()) any_trace = true;
        if (!any_trace) continue;
        const std::string name = "queues_" + detail::compare_tag(entry.policy, entry.v) + ".csv";
        std::ofstream q = open_output((dir / name).string());
        q << "policy,v,layout,slot,ue,queue\n";
        for (const LayoutResult &lay : entry.result.layouts)
            for (std::size_t t = 0; t < lay.queue_trace.size(); ++t)
                for (std::size_t k = 0; k < lay.queue_trace[t].size(); ++k)
                    q << policy_name(entry.policy) << ',' << format_double(entry.v) << ','
                      << lay.layout << ',' << t << ',' << k << ','
                      << format_double(lay.queue_trace[t][k]) << '\n';
        files.push_back(name);
    }
    return files;
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// One manifest per output directory; every produced file is listed here and
// re-running from the manifest reproduces the run.
inline void write_manifest(const std::filesystem::path &dir, const std::string &command,
                           const SimConfig &cfg, const nlohmann::json &parameters,
                           const std::vector<std::string> &outputs) {
    nlohmann::json manifest;
    manifest["command"] = command;
    manifest["version"] = kVersion;
    manifest["created_utc"] = utc_timestamp();
    manifest["base_seed"] = cfg.base_seed;
    nlohmann::json config = nlohmann::json::object();
    for (const auto &[key, value] : cfg.entries()) config[key] = value;
    manifest["config"] = config;
    manifest["parameters"] = parameters;
    manifest["outputs"] = outputs;
    std::ofstream out = open_output((dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

} // namespace cfsim
