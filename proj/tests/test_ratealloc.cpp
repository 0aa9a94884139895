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
// - allocate_rate: frozen enumerations, degenerate buffers, tie-breaks,
//   duplication invariance, fuzz against an independent enumerator
// - realize_service: frozen values, strict outage boundary, bounds
// - RateMemory: fill phase, eviction once full, rate recomputation

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <vector>

#include "cfsim/ratealloc.hpp"
#include "cfsim/rng.hpp"

using namespace cfsim;

namespace {

// Independent reference: count successes with a plain nested loop over a
// value -> count map, keeping the smallest maximizer.
AllocatedRate enumerate_reference(const std::vector<double> &samples) {
    std::map<double, int> counts;
    for (double s : samples) ++counts[s];
    AllocatedRate best;
    double best_objective = -1.0;
    for (const auto &[value, unused] : counts) {
        int at_least = 0;
        for (double s : samples)
            if (s >= value) ++at_least;
        const double p = static_cast<double>(at_least) / static_cast<double>(samples.size());
        if (value * p > best_objective) {
            best_objective = value * p;
            best.rate = value;
            best.probability = p;
        }
    }
    return best;
}

} // namespace

TEST_CASE("allocate_rate frozen enumerations") {
    SECTION("three distinct values") {
        const AllocatedRate a = allocate_rate({1.0, 2.0, 3.0});
        CHECK(a.rate == 2.0);
        CHECK(a.probability == Catch::Approx(2.0 / 3.0));
    }
    SECTION("aggressive choice wins on heavy upper tail") {
        const AllocatedRate a = allocate_rate({0.5, 4.0});
        CHECK(a.rate == 4.0);
        CHECK(a.probability == 0.5);
    }
    SECTION("order of the buffer is irrelevant") {
        const AllocatedRate a = allocate_rate({3.0, 1.0, 2.0});
        CHECK(a.rate == 2.0);
    }
}

TEST_CASE("allocate_rate on a degenerate buffer") {
    const AllocatedRate a = allocate_rate({1.7, 1.7, 1.7, 1.7});
    CHECK(a.rate == 1.7);
    CHECK(a.probability == 1.0);
}

TEST_CASE("allocate_rate breaks objective ties toward the smaller rate") {
    // 1*1 and 2*(1/2) both score 1; the conservative candidate wins.
    const AllocatedRate a = allocate_rate({1.0, 2.0});
    CHECK(a.rate == 1.0);
    CHECK(a.probability == 1.0);
}

TEST_CASE("allocate_rate refuses an empty buffer") {
    CHECK_THROWS_AS(allocate_rate({}), std::runtime_error);
}

TEST_CASE("the objective is invariant under sample duplication") {
    const std::vector<double> base{0.3, 1.1, 1.1, 2.4, 0.9};
    std::vector<double> doubled = base;
    doubled.insert(doubled.end(), base.begin(), base.end());
    const AllocatedRate a = allocate_rate(base);
    const AllocatedRate b = allocate_rate(doubled);
    CHECK(a.rate == b.rate);
    CHECK(a.probability == b.probability);
}

TEST_CASE("allocate_rate agrees with an independent enumerator") {
    Rng rng = make_rng(113);
    std::uniform_int_distribution<int> size_dist(1, 50);
    // A small discrete value set forces many duplicates and exact ties.
    std::uniform_int_distribution<int> value_dist(0, 7);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> samples(static_cast<std::size_t>(size_dist(rng)));
        for (double &s : samples) s = 0.25 * value_dist(rng);
        const AllocatedRate got = allocate_rate(samples);
        const AllocatedRate want = enumerate_reference(samples);
        REQUIRE(got.rate == want.rate);
        REQUIRE(got.probability == want.probability);
    }
}

TEST_CASE("realize_service frozen values") {
    CHECK(realize_service(2.0, 3.0, true, 20, 200) == Catch::Approx(1.8));
    CHECK(realize_service(2.0, 2.0, true, 20, 200) == 0.0); // boundary is outage
    CHECK(realize_service(2.0, 3.0, false, 20, 200) == 0.0);
    CHECK(realize_service(0.0, 3.0, true, 20, 200) == 0.0);
}

TEST_CASE("realize_service stays within its bounds") {
    Rng rng = make_rng(127);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const double rate = u(rng);
        const double mi = u(rng);
        const double service = realize_service(rate, mi, true, 20, 200);
        CHECK(service >= 0.0);
        CHECK(service <= 0.9 * rate);
    }
}

TEST_CASE("RateMemory fills then evicts at capacity") {
    RateMemory mem(2, 3);
    CHECK(mem.count(0) == 0);
    mem.record(0, 5.0);
    mem.record(0, 5.0);
    CHECK(mem.count(0) == 2);
    mem.record(0, 5.0);
    CHECK(mem.count(0) == 3);
    CHECK(mem.allocated_rate(0) == 5.0);
    CHECK(mem.success_probability(0) == 1.0);

    // A larger sample must not lower the rate of an all-equal buffer.
    mem.record(0, 6.0);
    CHECK(mem.count(0) == 3);
    CHECK(mem.allocated_rate(0) >= 5.0);

    // Two more inserts push out every original sample.
    mem.record(0, 1.0);
    mem.record(0, 1.0);
    CHECK(mem.count(0) == 3);
    const AllocatedRate expect = allocate_rate({6.0, 1.0, 1.0});
    CHECK(mem.allocated_rate(0) == expect.rate);
    CHECK(mem.success_probability(0) == expect.probability);

    // The second UE is untouched throughout.
    CHECK(mem.count(1) == 0);
    CHECK(mem.expected_service(1) == 0.0);
}

TEST_CASE("RateMemory keeps the expected service consistent") {
    RateMemory mem(1, 100);
    Rng rng = make_rng(131);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int i = 0; i < 250; ++i) {
        mem.record(0, u(rng));
        CHECK(mem.count(0) == std::min(i + 1, 100));
        const AllocatedRate expect = allocate_rate(mem.samples(0));
        CHECK(mem.allocated_rate(0) == expect.rate);
        CHECK(mem.expected_service(0) == expect.rate * expect.probability);
        double max_sample = 0.0;
        for (double s : mem.samples(0)) max_sample = std::max(max_sample, s);
        CHECK(mem.expected_service(0) <= max_sample);
    }
}
