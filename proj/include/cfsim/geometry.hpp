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
// Physical layout: radio-unit grid, random user drops and wrap-around
// (torus) distance/angle measurements on a square service area.

#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "cfsim/rng.hpp"

namespace cfsim {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// RU and UE positions on a square area with wrap-around distances.
// The torus convention is always in effect.
struct NetworkTopology {
    double area_side = 50.0;
    std::vector<Point> ru_positions;
    std::vector<Point> ue_positions;
};

// RUs at the cell centers of a uniform rows x cols grid.
inline std::vector<Point> place_rus(int rows, int cols, double area_side) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("place_rus: grid must be at least 1x1");
    std::vector<Point> rus;
    rus.reserve(static_cast<std::size_t>(rows) * cols);
    const double dx = area_side / cols;
    const double dy = area_side / rows;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            rus.push_back({(c + 0.5) * dx, (r + 0.5) * dy});
    return rus;
}

// k_tot i.i.d. uniform drops; deterministic for a fixed seed.
inline std::vector<Point> drop_ues(int k_tot, double area_side, std::uint64_t seed) {
    if (k_tot < 1) throw std::invalid_argument("drop_ues: need at least one UE");
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> u(0.0, area_side);
    std::vector<Point> ues(static_cast<std::size_t>(k_tot));
    for (auto &p : ues) {
        p.x = u(rng);
        p.y = u(rng);
    }
    return ues;
}

// Minimum-image displacement from -> to, components in [-side/2, side/2].
inline Point torus_displacement(Point from, Point to, double area_side) {
    double dx = to.x - from.x;
    double dy = to.y - from.y;
    dx -= area_side * std::round(dx / area_side);
    dy -= area_side * std::round(dy / area_side);
    return {dx, dy};
}

inline double torus_distance(Point p, Point q, double area_side) {
    const Point d = torus_displacement(p, q, area_side);
    return std::hypot(d.x, d.y);
}

// Azimuth of `to` as seen from `from`, measured on the minimum-image
// displacement so that it is consistent with torus_distance.
inline double torus_azimuth(Point from, Point to, double area_side) {
    const Point d = torus_displacement(from, to, area_side);
    return std::atan2(d.y, d.x);
}

// Radius of a disk whose area equals the per-RU share of the total area.
inline double reference_distance(double area, int l) {
    if (area <= 0.0 || l < 1) throw std::invalid_argument("reference_distance: bad arguments");
    return std::sqrt(area / (kPi * static_cast<double>(l)));
}

// Flat record list (entity, index, x, y) for plotting.
inline void write_layout_csv(std::ostream &os, const NetworkTopology &topo) {
    os << "entity,index,x,y\n";
    for (std::size_t i = 0; i < topo.ru_positions.size(); ++i)
        os << "ru," << i << ',' << topo.ru_positions[i].x << ',' << topo.ru_positions[i].y << '\n';
    for (std::size_t i = 0; i < topo.ue_positions.size(); ++i)
        os << "ue," << i << ',' << topo.ue_positions[i].x << ',' << topo.ue_positions[i].y << '\n';
}

} // namespace cfsim
