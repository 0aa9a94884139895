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
// UE-RU association (user-centric clustering), pilot reuse with subspace
// orthogonality, and subspace-projection channel estimation.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cfsim/channel.hpp"
#include "cfsim/rng.hpp"

namespace cfsim {

// ---------------------------------------------------------------------------
// Cluster formation
// ---------------------------------------------------------------------------

// Bipartite UE-RU graph held in three mutually consistent views.
struct AssociationGraph {
    int l = 0;
    int k = 0;
    std::vector<std::vector<int>> clusters; // per UE, ascending RU indices
    std::vector<std::vector<int>> served;   // per RU, ascending UE indices
    std::vector<std::uint8_t> edges;        // L x K row-major adjacency
    std::vector<std::uint8_t> covered;      // per UE: non-empty cluster

    bool is_edge(int ru, int ue) const {
        return edges[static_cast<std::size_t>(ru) * k + ue] != 0;
    }

    // Cross-checks the three views; used by tests.
    bool consistent() const {
        for (int ru = 0; ru < l; ++ru)
            for (int ue = 0; ue < k; ++ue) {
                const bool e = is_edge(ru, ue);
                const bool in_cluster = std::binary_search(clusters[ue].begin(), clusters[ue].end(), ru);
                const bool in_served = std::binary_search(served[ru].begin(), served[ru].end(), ue);
                if (e != in_cluster || e != in_served) return false;
            }
        for (int ue = 0; ue < k; ++ue)
            if ((covered[ue] != 0) != !clusters[ue].empty()) return false;
        return true;
    }
};

// Keeps every pair with lsfc >= eta / (m * snr), truncated per UE to the
// q_max strongest RUs (ties to the lower RU index). UEs with no qualifying
// RU are marked uncovered.
inline AssociationGraph form_clusters(const Eigen::MatrixXd &lsfc, double eta, int q_max,
                                      int m, double snr) {
    if (eta <= 0.0 || q_max < 1) throw std::invalid_argument("form_clusters: bad eta or q_max");
    AssociationGraph g;
    g.l = static_cast<int>(lsfc.rows());
    g.k = static_cast<int>(lsfc.cols());
    g.clusters.resize(g.k);
    g.served.resize(g.l);
    g.edges.assign(static_cast<std::size_t>(g.l) * g.k, 0);
    g.covered.assign(g.k, 0);
    const double threshold = eta / (m * snr);
    std::vector<int> candidates;
    for (int ue = 0; ue < g.k; ++ue) {
        candidates.clear();
        for (int ru = 0; ru < g.l; ++ru)
            if (lsfc(ru, ue) >= threshold) candidates.push_back(ru);
        if (static_cast<int>(candidates.size()) > q_max) {
            std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
                if (lsfc(a, ue) != lsfc(b, ue)) return lsfc(a, ue) > lsfc(b, ue);
                return a < b;
            });
            candidates.resize(q_max);
            std::sort(candidates.begin(), candidates.end());
        }
        g.clusters[ue] = candidates;
        g.covered[ue] = candidates.empty() ? 0 : 1;
        for (int ru : candidates) {
            g.edges[static_cast<std::size_t>(ru) * g.k + ue] = 1;
            g.served[ru].push_back(ue);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Pilot assignment
// ---------------------------------------------------------------------------

struct PilotAssignment {
    int tau_p = 0;
    std::vector<int> pilot_of; // K entries; -1 for UEs without a pilot
    struct Fallback {
        int ue = 0;
        int pilot = 0;
        double score = 0.0;
    };
    std::vector<Fallback> fallbacks; // UEs placed via the contamination score
};

namespace detail {
inline bool supports_disjoint(const std::vector<int> &a, const std::vector<int> &b) {
    for (int x : a)
        if (std::binary_search(b.begin(), b.end(), x)) return false;
    return true;
}

inline double support_overlap(const std::vector<int> &a, const std::vector<int> &b) {
    int common = 0;
    for (int x : a)
        if (std::binary_search(b.begin(), b.end(), x)) ++common;
    return static_cast<double>(common) / static_cast<double>(a.size());
}
} // namespace detail

// Strongest serving RU of a UE (ties to the lower RU index); -1 when the
// UE is uncovered. This RU acts as the UE's pilot assigner.
inline int anchor_ru(const AssociationGraph &graph, const Eigen::MatrixXd &lsfc, int ue) {
    int anchor = -1;
    double best = -1.0;
    for (int ru : graph.clusters[ue])
        if (lsfc(ru, ue) > best) {
            best = lsfc(ru, ue);
            anchor = ru;
        }
    return anchor;
}

// Greedy semi-overloaded reuse: active UEs ordered by decreasing best-RU
// gain take the lowest unused pilot while any remain, so pilots are only
// shared once all tau_p are taken. Reuse is vetted by the UE's anchor RU,
// which accepts a pilot only if every holder it serves keeps an orthogonal
// subspace to the new UE at the anchor; overlaps at the remaining serving
// RUs are tolerated and surface as pilot contamination in estimation.
// When no pilot passes the anchor check, the one with the smallest
// contamination score (overlap fraction weighted by the contaminating
// UE's gain, summed over conflicting serving RUs) is used and logged.
inline PilotAssignment assign_pilots(const AssociationGraph &graph, const AngularSupportTable &sup,
                                     const Eigen::MatrixXd &lsfc, const std::vector<int> &active,
                                     int tau_p) {
    if (tau_p < 1) throw std::invalid_argument("assign_pilots: tau_p must be positive");
    PilotAssignment pa;
    pa.tau_p = tau_p;
    pa.pilot_of.assign(graph.k, -1);

    std::vector<int> order = active;
    std::vector<double> best_gain(graph.k, 0.0);
    std::vector<int> anchor(graph.k, -1);
    for (int ue : order) {
        anchor[ue] = anchor_ru(graph, lsfc, ue);
        best_gain[ue] = anchor[ue] >= 0 ? lsfc(anchor[ue], ue) : 0.0;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (best_gain[a] != best_gain[b]) return best_gain[a] > best_gain[b];
        return a < b;
    });

    std::vector<std::vector<int>> holders(tau_p);
    std::vector<int> common;
    for (int ue : order) {
        if (graph.clusters[ue].empty()) continue; // uncovered UEs hold no pilot
        const int aru = anchor[ue];
        int chosen = -1;
        for (int p = 0; p < tau_p && chosen < 0; ++p)
            if (holders[p].empty()) chosen = p;
        for (int p = 0; p < tau_p && chosen < 0; ++p) {
            bool ok = true;
            for (int other : holders[p]) {
                if (!graph.is_edge(aru, other)) continue; // outside the anchor's view
                if (!detail::supports_disjoint(sup.at(aru, ue).indices, sup.at(aru, other).indices)) {
                    ok = false;
                    break;
                }
            }
            if (ok) chosen = p;
        }
        if (chosen < 0) {
            double best_score = std::numeric_limits<double>::infinity();
            for (int p = 0; p < tau_p; ++p) {
                double score = 0.0;
                for (int other : holders[p]) {
                    common.clear();
                    std::set_intersection(graph.clusters[ue].begin(), graph.clusters[ue].end(),
                                          graph.clusters[other].begin(), graph.clusters[other].end(),
                                          std::back_inserter(common));
                    for (int ru : common)
                        score += detail::support_overlap(sup.at(ru, ue).indices, sup.at(ru, other).indices) *
                                 lsfc(ru, other);
                }
                if (score < best_score) {
                    best_score = score;
                    chosen = p;
                }
            }
            pa.fallbacks.push_back({ue, chosen, best_score});
        }
        pa.pilot_of[ue] = chosen;
        holders[chosen].push_back(ue);
    }
    return pa;
}

// ---------------------------------------------------------------------------
// Subspace-projection channel estimation
// ---------------------------------------------------------------------------

// Estimates for the active served UEs of each RU (partial CSI: an RU only
// estimates its own served UEs).
struct ChannelEstimates {
    int m = 0;
    std::vector<Eigen::MatrixXcd> per_ru;    // L matrices, M x n_active_served
    std::vector<std::vector<int>> ue_of_col; // per RU, UE index of each column
    std::vector<std::vector<int>> col_of_ue; // per RU, K entries, -1 if absent

    bool has(int ru, int ue) const { return col_of_ue[ru][ue] >= 0; }
    Eigen::MatrixXcd::ConstColXpr column(int ru, int ue) const {
        return per_ru[ru].col(col_of_ue[ru][ue]);
    }
};

// Pilot matched-filter observation per (RU, pilot): the sum of all active
// co-pilot channels plus noise with per-component variance 1/(tau_p*snr),
// projected onto the UE's angular subspace.
inline ChannelEstimates estimate_channels(const ChannelRealization &chan,
                                          const PilotAssignment &pilots,
                                          const AssociationGraph &graph,
                                          const AngularSupportTable &sup, double snr, int tau_p,
                                          Rng &rng) {
    ChannelEstimates est;
    est.m = sup.m;
    est.per_ru.resize(graph.l);
    est.ue_of_col.resize(graph.l);
    est.col_of_ue.assign(graph.l, std::vector<int>(graph.k, -1));

    // Active UEs per pilot, in ascending UE order.
    std::vector<std::vector<int>> users_of_pilot(pilots.tau_p);
    for (int ue = 0; ue < graph.k; ++ue)
        if (chan.active[ue] && pilots.pilot_of[ue] >= 0) users_of_pilot[pilots.pilot_of[ue]].push_back(ue);

    const double noise_sigma = std::sqrt(1.0 / (2.0 * tau_p * snr)); // per real component
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::VectorXcd y(sup.m);

    for (int ru = 0; ru < graph.l; ++ru) {
        std::vector<int> &cols = est.ue_of_col[ru];
        for (int ue : graph.served[ru])
            if (chan.active[ue] && pilots.pilot_of[ue] >= 0) {
                est.col_of_ue[ru][ue] = static_cast<int>(cols.size());
                cols.push_back(ue);
            }
        est.per_ru[ru].resize(sup.m, static_cast<int>(cols.size()));
        if (cols.empty()) continue;

        // Pilots in use at this RU, ascending, each observed once.
        std::vector<int> used;
        for (int ue : cols) used.push_back(pilots.pilot_of[ue]);
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());

        std::vector<Eigen::VectorXcd> observation(pilots.tau_p);
        for (int p : used) {
            y.setZero();
            for (int ue : users_of_pilot[p]) y += chan.h.block(ru * sup.m, ue, sup.m, 1);
            for (int i = 0; i < sup.m; ++i)
                y(i) += std::complex<double>(noise_sigma * noise(rng), noise_sigma * noise(rng));
            observation[p] = y;
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const int ue = cols[c];
            const PairSubspace &sub = sup.at(ru, ue);
            const Eigen::VectorXcd &obs = observation[pilots.pilot_of[ue]];
            est.per_ru[ru].col(static_cast<int>(c)) = sub.basis * (sub.basis.adjoint() * obs);
        }
    }
    return est;
}

} // namespace cfsim
