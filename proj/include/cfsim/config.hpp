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
// Simulation configuration: all system parameters with their default
// values, validation, and a flat key=value file format.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsim/geometry.hpp"
#include "cfsim/scheduler.hpp"

namespace cfsim {

struct SimConfig {
    // Network geometry.
    int grid_rows = 3;
    int grid_cols = 4;
    double area_side = 50.0; // meters
    int antennas = 8;        // per RU

    // Population and per-slot activity.
    int k_tot = 100;
    int k_act = 40;

    // Coherence block and pilots.
    int tau_p = 20;
    int t_dim = 200; // symbols per coherence block

    // Channel and association.
    double delta = kPi / 8.0; // angular spread, radians
    double eta = 1.0;         // association SNR threshold, linear
    int q_max = 10;           // maximum cluster size

    // Rate allocation.
    int mem_window = 100; // MI samples kept per UE
    int n_init = 500;     // start-up slots

    // Scheduling.
    Policy policy = Policy::HFS;
    double v_param = 10000.0;
    double a_max = 0.0; // 0 = derive from start-up allocated rates

    // Run control.
    int t_s_limit = 1000;      // main-loop slots per layout (hard cap if stopping early)
    bool stop_at_steady = false;
    int steady_window = 500;
    double steady_tol = 0.05;
    int n_layouts = 5;
    std::uint64_t base_seed = 1;
    int n_workers = 0; // 0 = hardware concurrency

    // Link budget bookkeeping (reporting only; the simulation runs on the
    // normalized SNR).
    double bandwidth_hz = 10e6;
    double noise_dbm_hz = -174.0;

    // Metrics.
    double sumlog_floor = 1e-3; // bit/s/Hz substituted for zero throughput in sum-log

    int n_ru() const { return grid_rows * grid_cols; }
    double area() const { return area_side * area_side; }

    // Returns human-readable problems; empty means valid.
    std::vector<std::string> validate() const {
        std::vector<std::string> problems;
        auto positive = [&](double v, const char *name) {
            if (!(v > 0)) problems.push_back(std::string(name) + " must be positive");
        };
        positive(grid_rows, "grid_rows");
        positive(grid_cols, "grid_cols");
        positive(area_side, "area_side");
        positive(antennas, "antennas");
        positive(k_tot, "k_tot");
        positive(k_act, "k_act");
        positive(tau_p, "tau_p");
        positive(t_dim, "t_dim");
        positive(delta, "delta");
        positive(eta, "eta");
        positive(q_max, "q_max");
        positive(mem_window, "mem_window");
        positive(n_init, "n_init");
        positive(v_param, "v_param");
        positive(t_s_limit, "t_s_limit");
        positive(steady_window, "steady_window");
        positive(steady_tol, "steady_tol");
        positive(n_layouts, "n_layouts");
        positive(sumlog_floor, "sumlog_floor");
        if (tau_p >= t_dim) problems.push_back("tau_p must be smaller than t_dim");
        if (k_act > k_tot) problems.push_back("k_act must not exceed k_tot");
        if (a_max < 0) problems.push_back("a_max must be nonnegative (0 = automatic)");
        if (n_workers < 0) problems.push_back("n_workers must be nonnegative (0 = automatic)");
        if (delta > 2 * kPi) problems.push_back("delta must not exceed 2*pi");
        return problems;
    }

    void apply(const std::string &key, const std::string &value);
    std::map<std::string, std::string> entries() const;
};

namespace detail {
inline std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline int to_int(const std::string &v, const std::string &key) {
    std::size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config: bad integer for " + key + ": " + v);
    return out;
}

inline double to_double(const std::string &v, const std::string &key) {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config: bad number for " + key + ": " + v);
    return out;
}

inline bool to_bool(const std::string &v, const std::string &key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

inline std::string format_number(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}
} // namespace detail

inline void SimConfig::apply(const std::string &key, const std::string &value) {
    using detail::to_bool;
    using detail::to_double;
    using detail::to_int;
    if (key == "grid_rows") grid_rows = to_int(value, key);
    else if (key == "grid_cols") grid_cols = to_int(value, key);
    else if (key == "area_side") area_side = to_double(value, key);
    else if (key == "antennas") antennas = to_int(value, key);
    else if (key == "k_tot") k_tot = to_int(value, key);
    else if (key == "k_act") k_act = to_int(value, key);
    else if (key == "tau_p") tau_p = to_int(value, key);
    else if (key == "t_dim") t_dim = to_int(value, key);
    else if (key == "delta") delta = to_double(value, key);
    else if (key == "eta") eta = to_double(value, key);
    else if (key == "q_max") q_max = to_int(value, key);
    else if (key == "mem_window") mem_window = to_int(value, key);
    else if (key == "n_init") n_init = to_int(value, key);
    else if (key == "policy") policy = parse_policy(value);
    else if (key == "v_param") v_param = to_double(value, key);
    else if (key == "a_max") a_max = to_double(value, key);
    else if (key == "t_s_limit") t_s_limit = to_int(value, key);
    else if (key == "stop_at_steady") stop_at_steady = to_bool(value, key);
    else if (key == "steady_window") steady_window = to_int(value, key);
    else if (key == "steady_tol") steady_tol = to_double(value, key);
    else if (key == "n_layouts") n_layouts = to_int(value, key);
    else if (key == "base_seed") base_seed = std::stoull(value);
    else if (key == "n_workers") n_workers = to_int(value, key);
    else if (key == "bandwidth_hz") bandwidth_hz = to_double(value, key);
    else if (key == "noise_dbm_hz") noise_dbm_hz = to_double(value, key);
    else if (key == "sumlog_floor") sumlog_floor = to_double(value, key);
    else throw std::invalid_argument("config: unknown key: " + key);
}

// Ordered key/value view of every field, used by the file writer, the
// manifest, and describe-config.
inline std::map<std::string, std::string> SimConfig::entries() const {
    using detail::format_number;
    std::map<std::string, std::string> e;
    e["grid_rows"] = std::to_string(grid_rows);
    e["grid_cols"] = std::to_string(grid_cols);
    e["area_side"] = format_number(area_side);
    e["antennas"] = std::to_string(antennas);
    e["k_tot"] = std::to_string(k_tot);
    e["k_act"] = std::to_string(k_act);
    e["tau_p"] = std::to_string(tau_p);
    e["t_dim"] = std::to_string(t_dim);
    e["delta"] = format_number(delta);
    e["eta"] = format_number(eta);
    e["q_max"] = std::to_string(q_max);
    e["mem_window"] = std::to_string(mem_window);
    e["n_init"] = std::to_string(n_init);
    e["policy"] = policy_name(policy);
    e["v_param"] = format_number(v_param);
    e["a_max"] = format_number(a_max);
    e["t_s_limit"] = std::to_string(t_s_limit);
    e["stop_at_steady"] = stop_at_steady ? "true" : "false";
    e["steady_window"] = std::to_string(steady_window);
    e["steady_tol"] = format_number(steady_tol);
    e["n_layouts"] = std::to_string(n_layouts);
    e["base_seed"] = std::to_string(base_seed);
    e["n_workers"] = std::to_string(n_workers);
    e["bandwidth_hz"] = format_number(bandwidth_hz);
    e["noise_dbm_hz"] = format_number(noise_dbm_hz);
    e["sumlog_floor"] = format_number(sumlog_floor);
    return e;
}

// Flat key=value text applied onto an existing configuration; '#' starts
// a comment, blank lines ignored. Keys absent from the file keep their
// current values.
inline void parse_config_into(std::istream &in, SimConfig &cfg) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) + ": expected key=value");
        cfg.apply(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
}

inline SimConfig parse_config(std::istream &in) {
    SimConfig cfg;
    parse_config_into(in, cfg);
    return cfg;
}

inline SimConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    return parse_config(in);
}

inline void write_config(std::ostream &out, const SimConfig &cfg) {
    for (const auto &[key, value] : cfg.entries()) out << key << " = " << value << "\n";
}

} // namespace cfsim
