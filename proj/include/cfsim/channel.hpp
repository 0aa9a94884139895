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
// Large-scale fading, DFT angular subspaces and per-slot channel
// realizations for the single-ring local-scattering model. Each RU-UE
// block is h = sqrt(beta*M/|S|) * F_S * nu with nu i.i.d. CN(0,1), where
// F_S collects the DFT columns of the angular support S.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cfsim/geometry.hpp"
#include "cfsim/rng.hpp"

namespace cfsim {

// ---------------------------------------------------------------------------
// Pathloss / blocking model (3GPP-style dual slope, indoor-dense parameters).
// LOS:  PL(dB) = 30.5 + 20 log10(d),  shadowing sigma 4 dB
// NLOS: PL(dB) = 36.7 + 30 log10(d),  shadowing sigma 8 dB
// Distances are clamped to 1 m.
// ---------------------------------------------------------------------------

inline constexpr double kShadowSigmaLosDb = 4.0;
inline constexpr double kShadowSigmaNlosDb = 8.0;

inline double pathloss_db(double distance_m, bool los) {
    const double d = std::max(distance_m, 1.0);
    return los ? 30.5 + 20.0 * std::log10(d) : 36.7 + 30.0 * std::log10(d);
}

// Linear power gain, shadowing-free.
inline double pathloss(double distance_m, bool los) {
    return std::pow(10.0, -pathloss_db(distance_m, los) / 10.0);
}

// Distance-dependent LOS probability; equals 1 up to 18 m.
inline double los_probability(double distance_m) {
    const double d = std::max(distance_m, 1.0);
    const double decay = std::exp(-d / 36.0);
    return std::min(18.0 / d, 1.0) * (1.0 - decay) + decay;
}

// LOS-probability mixture of the shadowing-free pathloss.
inline double expected_pathloss(double distance_m) {
    const double p = los_probability(distance_m);
    return p * pathloss(distance_m, true) + (1.0 - p) * pathloss(distance_m, false);
}

// Transmit-power normalization: SNR such that beta_bar * M * SNR = 1 when
// the expected pathloss is evaluated at three reference distances.
inline double normalize_snr(double area, int l, int m) {
    const double d_eval = 3.0 * reference_distance(area, l);
    return 1.0 / (expected_pathloss(d_eval) * static_cast<double>(m));
}

// ---------------------------------------------------------------------------
// Large-scale state
// ---------------------------------------------------------------------------

struct LargeScaleState {
    Eigen::MatrixXd lsfc;               // L x K linear-scale coefficients
    std::vector<std::uint8_t> los;      // L x K row-major LOS flags
    double snr = 0.0;                   // P_ue / N0, linear, per channel use
    int l = 0;
    int k = 0;

    bool is_los(int ru, int ue) const { return los[static_cast<std::size_t>(ru) * k + ue] != 0; }
};

// Draws LOS flags and shadowing once per layout; the LSFCs stay fixed for
// every slot of the run.
inline LargeScaleState make_large_scale(const NetworkTopology &topo, int m, Rng &rng) {
    LargeScaleState ls;
    ls.l = static_cast<int>(topo.ru_positions.size());
    ls.k = static_cast<int>(topo.ue_positions.size());
    ls.lsfc.resize(ls.l, ls.k);
    ls.los.assign(static_cast<std::size_t>(ls.l) * ls.k, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> shadow_db(0.0, 1.0);
    for (int ue = 0; ue < ls.k; ++ue) {
        for (int ru = 0; ru < ls.l; ++ru) {
            const double d = torus_distance(topo.ru_positions[ru], topo.ue_positions[ue], topo.area_side);
            const bool los = u(rng) < los_probability(d);
            const double sigma = los ? kShadowSigmaLosDb : kShadowSigmaNlosDb;
            const double shadow = sigma * shadow_db(rng);
            ls.los[static_cast<std::size_t>(ru) * ls.k + ue] = los ? 1 : 0;
            ls.lsfc(ru, ue) = std::pow(10.0, (-pathloss_db(d, los) + shadow) / 10.0);
        }
    }
    const double area = topo.area_side * topo.area_side;
    ls.snr = normalize_snr(area, ls.l, m);
    return ls;
}

// ---------------------------------------------------------------------------
// DFT angular subspaces
// ---------------------------------------------------------------------------

// Unitary M x M DFT matrix, [F]_{m,n} = exp(-j 2 pi m n / M) / sqrt(M).
inline Eigen::MatrixXcd dft_matrix(int m) {
    if (m < 1) throw std::invalid_argument("dft_matrix: m must be positive");
    Eigen::MatrixXcd f(m, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            const double phase = -2.0 * kPi * r * c / m;
            f(r, c) = scale * std::complex<double>(std::cos(phase), std::sin(phase));
        }
    return f;
}

namespace detail {
// Circular distance between two angles, in [0, pi].
inline double angle_distance(double a, double b) {
    return std::fabs(std::remainder(a - b, 2.0 * kPi));
}
} // namespace detail

// DFT-quantized angles (multiples of 2 pi / m) strictly inside an interval
// of width delta centered on the azimuth. An empty set falls back to the
// single nearest quantized angle so the support is never empty.
inline std::vector<int> angular_support(double azimuth, int m, double delta) {
    if (m < 1) throw std::invalid_argument("angular_support: m must be positive");
    if (delta <= 0.0) throw std::invalid_argument("angular_support: delta must be positive");
    std::vector<int> support;
    int nearest = 0;
    double nearest_dist = std::numeric_limits<double>::infinity();
    for (int n = 0; n < m; ++n) {
        const double dist = detail::angle_distance(2.0 * kPi * n / m, azimuth);
        if (dist < delta / 2.0) support.push_back(n);
        if (dist < nearest_dist) {
            nearest_dist = dist;
            nearest = n;
        }
    }
    if (support.empty()) support.push_back(nearest);
    return support;
}

// Per-pair angular support with its DFT column basis F_S (M x |S|).
struct PairSubspace {
    std::vector<int> indices;
    Eigen::MatrixXcd basis;
};

struct AngularSupportTable {
    int l = 0;
    int k = 0;
    int m = 0;
    std::vector<PairSubspace> pairs; // row-major (ru, ue)

    const PairSubspace &at(int ru, int ue) const {
        return pairs[static_cast<std::size_t>(ru) * k + ue];
    }
};

inline AngularSupportTable make_supports(const NetworkTopology &topo, int m, double delta) {
    AngularSupportTable table;
    table.l = static_cast<int>(topo.ru_positions.size());
    table.k = static_cast<int>(topo.ue_positions.size());
    table.m = m;
    table.pairs.resize(static_cast<std::size_t>(table.l) * table.k);
    const Eigen::MatrixXcd f = dft_matrix(m);
    for (int ru = 0; ru < table.l; ++ru) {
        for (int ue = 0; ue < table.k; ++ue) {
            const double az = torus_azimuth(topo.ru_positions[ru], topo.ue_positions[ue], topo.area_side);
            PairSubspace &sub = table.pairs[static_cast<std::size_t>(ru) * table.k + ue];
            sub.indices = angular_support(az, m, delta);
            sub.basis.resize(m, static_cast<int>(sub.indices.size()));
            for (std::size_t c = 0; c < sub.indices.size(); ++c)
                sub.basis.col(static_cast<int>(c)) = f.col(sub.indices[c]);
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Per-slot channel realization
// ---------------------------------------------------------------------------

struct ChannelRealization {
    Eigen::MatrixXcd h;                  // (L*M) x K, inactive columns zero
    std::vector<std::uint8_t> active;    // K activity mask
};

// Fills `h` in place; columns of inactive UEs are zeroed. Draw order is
// fixed (UE-major, then RU, then subspace component) so a given rng state
// always produces the same matrix.
inline void realize_channel_into(Eigen::MatrixXcd &h, const LargeScaleState &ls,
                                 const AngularSupportTable &sup,
                                 const std::vector<std::uint8_t> &active_mask, Rng &rng) {
    const int lm = ls.l * sup.m;
    h.resize(lm, ls.k);
    h.setZero();
    ComplexNormal cn;
    Eigen::VectorXcd nu;
    for (int ue = 0; ue < ls.k; ++ue) {
        if (!active_mask[ue]) continue;
        for (int ru = 0; ru < ls.l; ++ru) {
            const PairSubspace &sub = sup.at(ru, ue);
            const int s = static_cast<int>(sub.indices.size());
            nu.resize(s);
            for (int i = 0; i < s; ++i) nu(i) = cn(rng);
            const double amp = std::sqrt(ls.lsfc(ru, ue) * sup.m / s);
            h.block(ru * sup.m, ue, sup.m, 1) = amp * (sub.basis * nu);
        }
    }
}

inline ChannelRealization realize_channel(const LargeScaleState &ls, const AngularSupportTable &sup,
                                          const std::vector<std::uint8_t> &active_mask, Rng &rng) {
    ChannelRealization chan;
    chan.active = active_mask;
    realize_channel_into(chan.h, ls, sup, active_mask, rng);
    return chan;
}

} // namespace cfsim
