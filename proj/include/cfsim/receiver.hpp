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
// Per-RU local MMSE combining, cluster-level combining weights, the
// unit-norm aggregate receiver, and instantaneous SINR / mutual
// information under the true channel.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "cfsim/association.hpp"

namespace cfsim {

// Local MMSE vectors for one RU: column j of the result is the normalized
// regularized solve against column j of the estimate matrix. The snr^{-1}
// regularizer keeps the system nonsingular for any estimate set.
inline Eigen::MatrixXcd local_mmse(const Eigen::MatrixXcd &estimates, double snr) {
    Eigen::MatrixXcd cov = estimates * estimates.adjoint();
    cov.diagonal().array() += 1.0 / snr;
    Eigen::MatrixXcd v = cov.llt().solve(estimates);
    for (int j = 0; j < static_cast<int>(v.cols()); ++j) {
        const double norm = v.col(j).norm();
        if (norm > 0.0) v.col(j) /= norm;
    }
    return v;
}

// Combining weights across the RUs of one cluster. Column `self` of
// `gains` holds the desired UE's effective per-RU gains, the remaining
// columns the interferers'. Maximizing the nominal SINR
//   |w^H g_self|^2 / (snr^{-1} ||w||^2 + sum_j |w^H g_j|^2)
// is a rank-one generalized eigenproblem whose dominant eigenvector is
// B^{-1} g_self with B the denominator matrix, so a Cholesky solve
// replaces an eigensolver. The result has unit norm and makes the
// effective desired gain real and nonnegative by construction.
inline Eigen::VectorXcd cluster_weights(const Eigen::MatrixXcd &gains, int self, double snr,
                                        bool *fell_back = nullptr) {
    const int c = static_cast<int>(gains.rows());
    if (fell_back) *fell_back = false;
    if (gains.col(self).norm() == 0.0) {
        if (fell_back) *fell_back = true;
        return Eigen::VectorXcd::Constant(c, std::complex<double>(1.0 / std::sqrt(double(c)), 0.0));
    }
    Eigen::MatrixXcd b = gains * gains.adjoint();
    b -= gains.col(self) * gains.col(self).adjoint();
    b.diagonal().array() += 1.0 / snr;
    Eigen::VectorXcd w = b.llt().solve(gains.col(self));
    w /= w.norm();
    return w;
}

// Aggregate receivers for the active UEs of one slot. Blocks outside a
// UE's cluster stay zero; uncovered or unserved UEs get an empty vector.
struct ReceiverState {
    std::vector<int> ue;                      // active UEs with a receiver
    std::vector<Eigen::VectorXcd> aggregate;  // L*M rows each, unit norm
    int weight_fallbacks = 0;                 // zero-gain clusters this slot
};

inline ReceiverState build_receivers(const ChannelEstimates &est, const AssociationGraph &graph,
                                     const std::vector<int> &active, double snr) {
    const int m = est.m;
    ReceiverState rs;

    // Local MMSE vectors per RU over its active served UEs.
    std::vector<Eigen::MatrixXcd> local(graph.l);
    for (int ru = 0; ru < graph.l; ++ru) local[ru] = local_mmse(est.per_ru[ru], snr);

    for (int k : active) {
        const std::vector<int> &cluster = graph.clusters[k];
        if (cluster.empty()) continue;
        const int c = static_cast<int>(cluster.size());

        // Effective per-RU gains of every active UE through UE k's local
        // vectors. RUs only know their own served UEs' estimates, so the
        // gain of an unserved interferer is zero in the nominal problem.
        Eigen::MatrixXcd gains = Eigen::MatrixXcd::Zero(c, static_cast<int>(active.size()));
        int self = -1;
        for (int jj = 0; jj < static_cast<int>(active.size()); ++jj) {
            const int j = active[jj];
            if (j == k) self = jj;
            for (int ci = 0; ci < c; ++ci) {
                const int ru = cluster[ci];
                if (!est.has(ru, k) || !est.has(ru, j)) continue;
                gains(ci, jj) =
                    local[ru].col(est.col_of_ue[ru][k]).dot(est.per_ru[ru].col(est.col_of_ue[ru][j]));
            }
        }
        bool fb = false;
        Eigen::VectorXcd w = cluster_weights(gains, self, snr, &fb);
        if (fb) ++rs.weight_fallbacks;

        Eigen::VectorXcd agg = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(graph.l) * m);
        for (int ci = 0; ci < c; ++ci) {
            const int ru = cluster[ci];
            if (!est.has(ru, k)) continue;
            agg.segment(static_cast<Eigen::Index>(ru) * m, m) = w(ci) * local[ru].col(est.col_of_ue[ru][k]);
        }
        const double norm = agg.norm();
        if (norm == 0.0) continue; // no usable estimate anywhere in the cluster
        agg /= norm;
        rs.ue.push_back(k);
        rs.aggregate.push_back(std::move(agg));
    }
    return rs;
}

struct SinrMi {
    double sinr = 0.0;
    double mi = 0.0;
};

// Instantaneous SINR under the TRUE channel and the resulting mutual
// information in bits per symbol. Interference sums over every other
// active UE, served or not.
inline SinrMi sinr_and_mi(const Eigen::VectorXcd &aggregate, const Eigen::MatrixXcd &h, int ue,
                          double snr, const std::vector<std::uint8_t> &active) {
    const int k = static_cast<int>(h.cols());
    double denom = 1.0 / snr;
    for (int j = 0; j < k; ++j) {
        if (j == ue || !active[j]) continue;
        denom += std::norm(aggregate.dot(h.col(j)));
    }
    SinrMi out;
    out.sinr = std::norm(aggregate.dot(h.col(ue))) / denom;
    out.mi = std::log2(1.0 + out.sinr);
    return out;
}

} // namespace cfsim
