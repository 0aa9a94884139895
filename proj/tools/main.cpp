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
// Command-line front end: `cfsim load-sweep`, `cfsim compare`, and
// `cfsim describe-config`. Exit codes: 0 success, 2 configuration or
// usage error, 3 I/O error.

#include <CLI11.hpp>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cfsim/cfsim.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
    std::string config_path;
    std::uint64_t seed = 0;
    int layouts = 0;
    std::string out;
    bool force = false;
    bool trace_queues = false;
    std::vector<std::string> policies;
    std::vector<double> v_values;
    std::vector<int> k_values;
    std::vector<int> tau_values;
};

void add_config_options(CLI::App *cmd, Options &o) {
    cmd->add_option("--config", o.config_path,
                    "Configuration file (key=value) or a manifest.json from a previous run");
    cmd->add_option("--seed", o.seed, "Base seed for the per-layout random streams");
    cmd->add_option("--layouts", o.layouts, "Number of independent layouts")->check(CLI::PositiveNumber);
}

void add_output_options(CLI::App *cmd, Options &o) {
    cmd->add_option("--out", o.out, "Output directory")->required();
    cmd->add_flag("--force", o.force, "Write into a non-empty output directory");
}

// True when the file's first non-whitespace byte opens a JSON object.
bool looks_like_manifest(const std::string &path) {
    std::ifstream in(path);
    char c = 0;
    while (in.get(c))
        if (!std::isspace(static_cast<unsigned char>(c))) return c == '{';
    return false;
}

// Layered configuration: recipe defaults (already in cfg), then the config
// file or manifest, then explicit flags. Manifest parameter lists fill in
// any sweep/compare lists the user did not pass on the command line.
void merge_config(const CLI::App *cmd, const Options &o, cfsim::SimConfig &cfg,
                  Options &lists) {
    if (!o.config_path.empty()) {
        if (looks_like_manifest(o.config_path)) {
            std::ifstream in(o.config_path);
            if (!in) throw std::runtime_error("cannot open " + o.config_path);
            const nlohmann::json manifest = nlohmann::json::parse(in);
            if (manifest.contains("config"))
                for (const auto &[key, value] : manifest.at("config").items())
                    cfg.apply(key, value.get<std::string>());
            if (manifest.contains("parameters")) {
                const nlohmann::json &p = manifest.at("parameters");
                // Only the lists this subcommand defines, and only when the
                // user did not pass the flag.
                auto flag_unset = [&](const std::string &flag) {
                    const CLI::Option *opt = cmd->get_option_no_throw(flag);
                    return opt != nullptr && opt->count() == 0;
                };
                if (flag_unset("--policies") && p.contains("policies"))
                    lists.policies = p.at("policies").get<std::vector<std::string>>();
                if (flag_unset("--v-values") && p.contains("v_values"))
                    lists.v_values = p.at("v_values").get<std::vector<double>>();
                if (flag_unset("--k-values") && p.contains("k_values"))
                    lists.k_values = p.at("k_values").get<std::vector<int>>();
                if (flag_unset("--tau-values") && p.contains("tau_values"))
                    lists.tau_values = p.at("tau_values").get<std::vector<int>>();
            }
        } else {
            std::ifstream in(o.config_path);
            if (!in) throw std::runtime_error("cannot open " + o.config_path);
            cfsim::parse_config_into(in, cfg);
        }
    }
    if (cmd->count("--seed")) cfg.base_seed = o.seed;
    if (cmd->count("--layouts")) cfg.n_layouts = o.layouts;
}

// Validates and reports every problem, not just the first.
bool config_ok(const cfsim::SimConfig &cfg) {
    const std::vector<std::string> problems = cfg.validate();
    for (const std::string &p : problems) std::cerr << "config error: " << p << "\n";
    return problems.empty();
}

// Refuses to clobber unrelated data: an existing non-empty directory needs
// --force.
void prepare_out_dir(const std::string &out, bool force) {
    const fs::path dir(out);
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) throw std::runtime_error(out + " exists and is not a directory");
        if (!fs::is_empty(dir) && !force)
            throw std::runtime_error(out + " is not empty (use --force to write anyway)");
    } else {
        fs::create_directories(dir);
    }
}

// Removes the result files this tool may have produced, leaving anything
// else in the directory alone.
void remove_partial_outputs(const std::string &out) {
    const fs::path dir(out);
    std::error_code ec;
    if (!fs::exists(dir, ec)) return;
    for (const auto &entry : fs::directory_iterator(dir, ec)) {
        const std::string name = entry.path().filename().string();
        if (name == "sweep_sum.csv" || name == "sweep_ue.csv" || name == "compare_ue.csv" ||
            name == "compare_rates.csv" || name == "compare_summary.json" ||
            name == "manifest.json" || name.rfind("queues_", 0) == 0)
            fs::remove(entry.path(), ec);
    }
}

int cmd_load_sweep(const CLI::App *cmd, Options &o) {
    cfsim::SimConfig cfg;
    cfg.n_layouts = 50; // per-layout drops dominate the sum-throughput variance
    Options lists;
    lists.k_values = {16, 32, 48, 64, 80, 96};
    lists.tau_values = {cfg.tau_p};
    merge_config(cmd, o, cfg, lists);
    if (cmd->count("--k-values")) lists.k_values = o.k_values;
    if (cmd->count("--tau-values")) lists.tau_values = o.tau_values;
    if (lists.k_values.empty()) {
        std::cerr << "config error: K list must not be empty\n";
        return kExitConfig;
    }
    if (!config_ok(cfg)) return kExitConfig;

    prepare_out_dir(o.out, o.force);
    try {
        std::cerr << "load-sweep: " << lists.k_values.size() * lists.tau_values.size()
                  << " configurations, " << cfg.n_layouts << " layouts each\n";
        const cfsim::SweepResult sweep = cfsim::run_load_sweep(cfg, lists.k_values, lists.tau_values);
        std::vector<std::string> files = cfsim::write_sweep_csvs(sweep, o.out);
        const nlohmann::json parameters = {{"k_values", lists.k_values},
                                           {"tau_values", lists.tau_values}};
        cfsim::write_manifest(o.out, "load-sweep", cfg, parameters, files);
        for (const cfsim::SweepResult::Entry &entry : sweep.entries) {
            double mean_sum = 0.0;
            for (const cfsim::LayoutResult &lay : entry.result.layouts)
                for (double r : lay.throughput) mean_sum += r;
            mean_sum /= entry.result.layouts.size();
            std::cerr << "  K=" << entry.k << " tau_p=" << entry.tau_p
                      << " mean sum throughput = " << cfsim::format_double(mean_sum)
                      << " bit/s/Hz\n";
        }
        return kExitOk;
    } catch (const std::exception &) {
        remove_partial_outputs(o.out);
        throw;
    }
}

int cmd_compare(const CLI::App *cmd, Options &o) {
    cfsim::SimConfig cfg;
    cfg.n_layouts = 5;
    cfg.stop_at_steady = true;
    cfg.t_s_limit = 20000; // hard cap when stopping at steady state
    Options lists;
    lists.policies = {"HFS", "PFS", "RANDOM", "ROUND_ROBIN", "MAX_SUM_RATE"};
    lists.v_values = {cfg.v_param};
    merge_config(cmd, o, cfg, lists);
    if (cmd->count("--policies")) lists.policies = o.policies;
    if (cmd->count("--v-values")) lists.v_values = o.v_values;
    if (lists.policies.empty()) {
        std::cerr << "config error: policy list must not be empty\n";
        return kExitConfig;
    }
    std::vector<cfsim::Policy> policies;
    for (const std::string &name : lists.policies) policies.push_back(cfsim::parse_policy(name));
    for (double v : lists.v_values)
        if (!(v > 0.0)) {
            std::cerr << "config error: V values must be positive\n";
            return kExitConfig;
        }
    if (!config_ok(cfg)) return kExitConfig;

    prepare_out_dir(o.out, o.force);
    try {
        std::cerr << "compare: " << policies.size() << " policies, " << cfg.n_layouts
                  << " layouts each\n";
        const cfsim::CompareResult cmp =
            cfsim::run_compare(cfg, policies, lists.v_values, o.trace_queues);
        std::vector<std::string> files = cfsim::write_compare_csvs(cmp, o.out);
        const nlohmann::json parameters = {{"policies", lists.policies},
                                           {"v_values", lists.v_values},
                                           {"trace_queues", o.trace_queues}};
        cfsim::write_manifest(o.out, "compare", cfg, parameters, files);
        for (const cfsim::CompareResult::Entry &entry : cmp.entries)
            std::cerr << "  " << cfsim::policy_name(entry.policy)
                      << (entry.v > 0.0 ? " V=" + cfsim::format_double(entry.v) : std::string())
                      << ": sum=" << cfsim::format_double(entry.summary.sum_throughput)
                      << " pct10=" << cfsim::format_double(entry.summary.pct10)
                      << " sum_log=" << cfsim::format_double(entry.summary.sum_log) << "\n";
        return kExitOk;
    } catch (const std::exception &) {
        remove_partial_outputs(o.out);
        throw;
    }
}

int cmd_describe_config(const CLI::App *cmd, Options &o) {
    cfsim::SimConfig cfg;
    Options lists;
    merge_config(cmd, o, cfg, lists);
    if (!config_ok(cfg)) return kExitConfig;
    std::cout << "# cfsim " << cfsim::kVersion << " effective configuration\n";
    cfsim::write_config(std::cout, cfg);
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"cfsim - uplink scheduling simulator for dense user-centric cell-free "
                 "massive MIMO networks"};
    app.require_subcommand(1);
    Options o;

    CLI::App *sweep = app.add_subcommand(
        "load-sweep", "All-active sum-throughput sweep over the UE population size");
    add_config_options(sweep, o);
    add_output_options(sweep, o);
    sweep->add_option("--k-values", o.k_values, "UE population sizes to sweep")
        ->delimiter(',');
    sweep->add_option("--tau-values", o.tau_values, "Pilot dimensions to sweep")->delimiter(',');

    CLI::App *cmp =
        app.add_subcommand("compare", "Scheduling policy comparison at fixed population");
    add_config_options(cmp, o);
    add_output_options(cmp, o);
    cmp->add_option("--policies", o.policies,
                    "Policies to run (HFS, PFS, RANDOM, ROUND_ROBIN, MAX_SUM_RATE)")
        ->delimiter(',');
    cmp->add_option("--v-values", o.v_values, "Drift-plus-penalty V values for HFS and PFS")
        ->delimiter(',');
    cmp->add_flag("--trace-queues", o.trace_queues, "Write per-slot virtual queue traces");

    CLI::App *desc =
        app.add_subcommand("describe-config", "Print the effective configuration as key=value");
    add_config_options(desc, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sweep->parsed()) return cmd_load_sweep(sweep, o);
        if (cmp->parsed()) return cmd_compare(cmp, o);
        if (desc->parsed()) return cmd_describe_config(desc, o);
        return kExitConfig;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
