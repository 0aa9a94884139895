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
// Covered tests:
// - RU grid placement at cell centers
// - Uniform UE drops: determinism, range, sample mean
// - Torus distance: wrap-around values, symmetry, diameter bound
// - Torus azimuth consistency with the minimum-image displacement
// - Reference distance formula
// - Layout CSV export

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "cfsim/geometry.hpp"

using namespace cfsim;

TEST_CASE("place_rus puts RUs at cell centers") {
    SECTION("1x1 grid") {
        const std::vector<Point> rus = place_rus(1, 1, 50.0);
        REQUIRE(rus.size() == 1);
        CHECK(rus[0].x == Catch::Approx(25.0));
        CHECK(rus[0].y == Catch::Approx(25.0));
    }

    SECTION("3x4 default grid") {
        const std::vector<Point> rus = place_rus(3, 4, 50.0);
        REQUIRE(rus.size() == 12);
        std::vector<double> xs, ys;
        for (const Point &p : rus) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        REQUIRE(xs.size() == 4);
        REQUIRE(ys.size() == 3);
        const double expect_x[] = {6.25, 18.75, 31.25, 43.75};
        for (int i = 0; i < 4; ++i) CHECK(xs[i] == Catch::Approx(expect_x[i]));
        CHECK(ys[0] == Catch::Approx(50.0 / 6.0));
        CHECK(ys[1] == Catch::Approx(25.0));
        CHECK(ys[2] == Catch::Approx(250.0 / 6.0));
    }

    SECTION("2x2 grid on a 10 m square") {
        const std::vector<Point> rus = place_rus(2, 2, 10.0);
        REQUIRE(rus.size() == 4);
        CHECK(rus[0].x == Catch::Approx(2.5));
        CHECK(rus[0].y == Catch::Approx(2.5));
        CHECK(rus[3].x == Catch::Approx(7.5));
        CHECK(rus[3].y == Catch::Approx(7.5));
    }

    SECTION("degenerate grids are rejected") {
        CHECK_THROWS_AS(place_rus(0, 4, 50.0), std::invalid_argument);
        CHECK_THROWS_AS(place_rus(3, 0, 50.0), std::invalid_argument);
    }
}

TEST_CASE("drop_ues is uniform and reproducible") {
    SECTION("same seed, same drop") {
        const std::vector<Point> a = drop_ues(100, 50.0, 7);
        const std::vector<Point> b = drop_ues(100, 50.0, 7);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].x == b[i].x);
            CHECK(a[i].y == b[i].y);
        }
    }

    SECTION("points stay inside the square") {
        for (const Point &p : drop_ues(1000, 50.0, 3)) {
            CHECK(p.x >= 0.0);
            CHECK(p.x < 50.0);
            CHECK(p.y >= 0.0);
            CHECK(p.y < 50.0);
        }
    }

    SECTION("sample mean near the area center") {
        const std::vector<Point> ues = drop_ues(10000, 50.0, 11);
        double mx = 0.0, my = 0.0;
        for (const Point &p : ues) {
            mx += p.x;
            my += p.y;
        }
        mx /= ues.size();
        my /= ues.size();
        CHECK(std::fabs(mx - 25.0) < 1.0);
        CHECK(std::fabs(my - 25.0) < 1.0);
    }

    SECTION("needs at least one UE") {
        CHECK_THROWS_AS(drop_ues(0, 50.0, 1), std::invalid_argument);
    }
}

TEST_CASE("torus_distance uses the minimum image") {
    CHECK(torus_distance({1, 1}, {49, 1}, 50.0) == Catch::Approx(2.0));
    CHECK(torus_distance({0, 0}, {25, 25}, 50.0) == Catch::Approx(35.35533905932738));
    CHECK(torus_distance({10, 10}, {13, 14}, 50.0) == Catch::Approx(5.0));
}

TEST_CASE("torus_distance properties") {
    Rng rng = make_rng(99);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int i = 0; i < 500; ++i) {
        const Point p{u(rng), u(rng)};
        const Point q{u(rng), u(rng)};
        const double pq = torus_distance(p, q, 50.0);
        const double qp = torus_distance(q, p, 50.0);
        CHECK(pq == Catch::Approx(qp));
        CHECK(pq <= 50.0 / std::sqrt(2.0) + 1e-12);
        CHECK(torus_distance(p, p, 50.0) == 0.0);
    }
}

TEST_CASE("torus_azimuth matches the displacement actually used") {
    Rng rng = make_rng(5);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        const Point p{u(rng), u(rng)};
        const Point q{u(rng), u(rng)};
        const double d = torus_distance(p, q, 50.0);
        const double az = torus_azimuth(p, q, 50.0);
        // Walking the reported distance along the reported azimuth lands on
        // the target modulo the wrap-around.
        const double rx = std::remainder(p.x + d * std::cos(az) - q.x, 50.0);
        const double ry = std::remainder(p.y + d * std::sin(az) - q.y, 50.0);
        CHECK(std::fabs(rx) < 1e-9);
        CHECK(std::fabs(ry) < 1e-9);
    }
    CHECK(torus_azimuth({1, 1}, {49, 1}, 50.0) == Catch::Approx(kPi));
}

TEST_CASE("reference_distance is the equal-area disk radius") {
    CHECK(reference_distance(2500.0, 12) == Catch::Approx(8.143375198382));
    CHECK(reference_distance(kPi, 1) == Catch::Approx(1.0));
    CHECK(reference_distance(100.0 * kPi, 4) == Catch::Approx(5.0));
    CHECK_THROWS_AS(reference_distance(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(reference_distance(100.0, 0), std::invalid_argument);
}

TEST_CASE("layout CSV lists every entity") {
    NetworkTopology topo;
    topo.area_side = 50.0;
    topo.ru_positions = place_rus(3, 4, 50.0);
    topo.ue_positions = drop_ues(10, 50.0, 2);
    std::ostringstream out;
    write_layout_csv(out, topo);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "entity,index,x,y");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 22);
}
