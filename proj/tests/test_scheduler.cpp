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
// - PFS arrivals: closed form vs. golden-section maximizer, empty-queue
//   bound, scale property
// - HFS arrivals: strict threshold, two-point enumeration oracle,
//   dependence on the queue sum only
// - Top-K activation: exhaustive subset oracle, tie determinism,
//   eligibility handling
// - Baselines: round-robin cadence, random reproducibility, max-sum-rate
//   ordering
// - Queue recursion: frozen values, nonnegativity fuzz
// - SchedulerState: activation budget, baseline queues untouched

#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "cfsim/scheduler.hpp"

using namespace cfsim;

namespace {

// Independent 1-D maximizer of V*log(a) - Q*a on [lo, hi].
double golden_section(double v, double q, double lo, double hi) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [&](double a) { return v * std::log(a) - q * a; };
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    for (int it = 0; it < 200; ++it) {
        if (f(c) > f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    return 0.5 * (a + b);
}

std::vector<std::uint8_t> all_eligible(int k_tot) { return std::vector<std::uint8_t>(k_tot, 1); }

std::vector<int> active_set(const std::vector<std::uint8_t> &x) {
    std::vector<int> s;
    for (int k = 0; k < static_cast<int>(x.size()); ++k)
        if (x[k]) s.push_back(k);
    return s;
}

} // namespace

TEST_CASE("arrivals_pfs closed form") {
    SECTION("frozen operating point") {
        const std::vector<double> a = arrivals_pfs({50000.0}, 10000.0, 1.0);
        CHECK(a[0] == Catch::Approx(0.2));
    }
    SECTION("empty queue saturates the box bound") {
        const std::vector<double> a = arrivals_pfs({0.0, 2.0}, 10.0, 1.5);
        CHECK(a[0] == 1.5);
        CHECK(a[1] == 1.5); // min(10/2, 1.5)
    }
    SECTION("matches a golden-section maximizer per component") {
        Rng rng = make_rng(137);
        std::uniform_real_distribution<double> uq(0.0, 2000.0);
        std::uniform_real_distribution<double> uv(1.0, 500.0);
        for (int rep = 0; rep < 100; ++rep) {
            const double v = uv(rng);
            const double a_max = 2.0;
            std::vector<double> queues(8);
            for (double &q : queues) q = uq(rng);
            const std::vector<double> a = arrivals_pfs(queues, v, a_max);
            for (std::size_t k = 0; k < queues.size(); ++k) {
                const double numeric = golden_section(v, queues[k], 1e-9, a_max);
                CHECK(a[k] == Catch::Approx(numeric).margin(1e-6));
            }
        }
    }
    SECTION("queue scaling equals drift-parameter scaling") {
        const std::vector<double> queues{3.0, 40.0, 0.0, 700.0};
        const double c = 5.0;
        std::vector<double> scaled = queues;
        for (double &q : scaled) q *= c;
        const std::vector<double> lhs = arrivals_pfs(scaled, 100.0, 1.0);
        const std::vector<double> rhs = arrivals_pfs(queues, 100.0 / c, 1.0);
        for (std::size_t k = 0; k < queues.size(); ++k)
            CHECK(lhs[k] == Catch::Approx(rhs[k]).epsilon(1e-12));
    }
    SECTION("rejects nonpositive parameters") {
        CHECK_THROWS_AS(arrivals_pfs({1.0}, 0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(arrivals_pfs({1.0}, 1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("arrivals_hfs threshold behavior") {
    SECTION("strictly below the drift parameter") {
        const std::vector<double> a = arrivals_hfs({500.0, 499.5}, 1000.0, 0.7);
        CHECK(a == std::vector<double>{0.7, 0.7});
    }
    SECTION("boundary is off") {
        const std::vector<double> a = arrivals_hfs({500.0, 500.0}, 1000.0, 0.7);
        CHECK(a == std::vector<double>{0.0, 0.0});
    }
    SECTION("matches the two-point enumeration oracle") {
        Rng rng = make_rng(139);
        std::uniform_real_distribution<double> uq(0.0, 30.0);
        for (int rep = 0; rep < 1000; ++rep) {
            std::vector<double> queues(6);
            double total = 0.0;
            for (double &q : queues) {
                q = uq(rng);
                total += q;
            }
            const double v = uq(rng) * 6.0;
            const double a_max = 0.9;
            // The common arrival enters the drift bound as kappa*(V - sum Q);
            // enumerate both endpoints, preferring zero unless strictly better.
            const double gain_on = a_max * (v - total);
            const double want = gain_on > 0.0 ? a_max : 0.0;
            const std::vector<double> a = arrivals_hfs(queues, v, a_max);
            for (double ak : a) REQUIRE(ak == want);
        }
    }
    SECTION("depends on the queues only through their sum") {
        std::vector<double> queues{4.0, 1.0, 9.0, 2.0, 0.0, 8.0};
        const std::vector<double> base = arrivals_hfs(queues, 25.0, 1.0);
        std::vector<double> moved{8.0, 9.0, 0.0, 2.0, 1.0, 4.0}; // same multiset
        CHECK(arrivals_hfs(moved, 25.0, 1.0) == base);
        std::vector<double> merged{24.0, 0.0, 0.0, 0.0, 0.0, 0.0}; // same total
        CHECK(arrivals_hfs(merged, 25.0, 1.0) == base);
    }
}

TEST_CASE("select_topk picks the largest queue-rate products") {
    const std::vector<double> queues{1.0, 5.0, 3.0, 2.0, 4.0};
    const std::vector<double> rates{1.0, 1.0, 2.0, 1.0, 1.0};
    // products: 1, 5, 6, 2, 4
    const std::vector<std::uint8_t> x = select_topk(queues, rates, 2, all_eligible(5));
    CHECK(active_set(x) == std::vector<int>{1, 2});
}

TEST_CASE("select_topk matches exhaustive subset enumeration") {
    Rng rng = make_rng(149);
    std::uniform_int_distribution<int> grid(0, 4);
    const int k_tot = 12;
    for (int k_act : {1, 3, 5}) {
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> queues(k_tot), rates(k_tot);
            for (int k = 0; k < k_tot; ++k) {
                queues[k] = 0.5 * grid(rng); // coarse grid forces ties
                rates[k] = 0.25 * grid(rng);
            }
            const std::vector<std::uint8_t> x = select_topk(queues, rates, k_act, all_eligible(k_tot));
            double got = 0.0;
            for (int k = 0; k < k_tot; ++k)
                if (x[k]) got += queues[k] * rates[k];
            double best = 0.0;
            for (unsigned mask = 0; mask < (1u << k_tot); ++mask) {
                if (std::popcount(mask) != k_act) continue;
                double obj = 0.0;
                for (int k = 0; k < k_tot; ++k)
                    if (mask & (1u << k)) obj += queues[k] * rates[k];
                best = std::max(best, obj);
            }
            REQUIRE(got == Catch::Approx(best).margin(1e-12));
        }
    }
}

TEST_CASE("select_topk breaks total ties toward the lowest indices") {
    const std::vector<double> zeros(6, 0.0);
    const std::vector<std::uint8_t> x = select_topk(zeros, zeros, 3, all_eligible(6));
    CHECK(active_set(x) == std::vector<int>{0, 1, 2});
}

TEST_CASE("select_topk activates everyone when few are eligible") {
    std::vector<std::uint8_t> eligible(8, 0);
    eligible[2] = eligible[5] = 1;
    const std::vector<double> queues(8, 1.0), rates(8, 1.0);
    const std::vector<std::uint8_t> x = select_topk(queues, rates, 5, eligible);
    CHECK(active_set(x) == std::vector<int>{2, 5});
}

TEST_CASE("select_round_robin visits the population in fixed cadence") {
    int cursor = 0;
    std::vector<int> want1, want2, want3;
    for (int k = 0; k < 40; ++k) want1.push_back(k);
    for (int k = 40; k < 80; ++k) want2.push_back(k);
    for (int k = 0; k < 20; ++k) want3.push_back(k);
    for (int k = 80; k < 100; ++k) want3.push_back(k);
    CHECK(active_set(select_round_robin(100, 40, cursor, all_eligible(100))) == want1);
    CHECK(active_set(select_round_robin(100, 40, cursor, all_eligible(100))) == want2);
    CHECK(active_set(select_round_robin(100, 40, cursor, all_eligible(100))) == want3);
    CHECK(cursor == 20);
}

TEST_CASE("select_round_robin forfeits the turns of ineligible UEs") {
    int cursor = 0;
    std::vector<std::uint8_t> eligible = all_eligible(10);
    eligible[1] = 0;
    const std::vector<std::uint8_t> x = select_round_robin(10, 4, cursor, eligible);
    CHECK(active_set(x) == std::vector<int>{0, 2, 3});
    CHECK(cursor == 4); // cadence does not slow down for the skipped UE
}

TEST_CASE("select_random is reproducible and respects eligibility") {
    std::vector<std::uint8_t> eligible = all_eligible(30);
    eligible[7] = 0;
    Rng rng1 = make_rng(151);
    Rng rng2 = make_rng(151);
    const std::vector<std::uint8_t> x1 = select_random(30, 10, eligible, rng1);
    const std::vector<std::uint8_t> x2 = select_random(30, 10, eligible, rng2);
    CHECK(x1 == x2);
    CHECK(active_set(x1).size() == 10);
    CHECK(!x1[7]);
}

TEST_CASE("select_max_sum_rate takes the best expected rates") {
    const std::vector<double> rates{0.5, 2.0, 2.0, 0.1, 3.0};
    const std::vector<std::uint8_t> x = select_max_sum_rate(rates, 2, all_eligible(5));
    CHECK(active_set(x) == std::vector<int>{1, 4}); // tie at 2.0 goes to UE 1
}

TEST_CASE("update_queues recursion") {
    SECTION("frozen values") {
        std::vector<double> q{0.0, 10.0};
        update_queues(q, {5.0, 1.8}, {2.0, 0.2});
        CHECK(q[0] == 2.0);
        CHECK(q[1] == Catch::Approx(8.4));
    }
    SECTION("nonnegativity under fuzzing") {
        Rng rng = make_rng(157);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        std::vector<double> q(5, 0.0);
        for (int step = 0; step < 10000; ++step) {
            std::vector<double> service(5), arrivals(5);
            for (int k = 0; k < 5; ++k) {
                service[k] = u(rng);
                arrivals[k] = u(rng);
            }
            std::vector<double> before = q;
            update_queues(q, service, arrivals);
            for (int k = 0; k < 5; ++k) {
                REQUIRE(q[k] >= 0.0);
                // Scalar recomputation of the same step.
                REQUIRE(q[k] == std::max(before[k] - service[k], 0.0) + arrivals[k]);
            }
        }
    }
}

TEST_CASE("every policy respects the activation budget") {
    Rng rng = make_rng(163);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const int k_tot = 25, k_act = 9;
    std::vector<std::uint8_t> eligible = all_eligible(k_tot);
    eligible[3] = eligible[12] = 0;
    for (Policy p : {Policy::HFS, Policy::PFS, Policy::RANDOM, Policy::ROUND_ROBIN, Policy::MAX_SUM_RATE}) {
        SchedulerState st(p, k_tot, 100.0, 1.0);
        std::vector<double> expected(k_tot);
        for (int slot = 0; slot < 20; ++slot) {
            for (double &e : expected) e = u(rng);
            const std::vector<std::uint8_t> x = st.decide(expected, k_act, eligible, rng);
            CHECK(static_cast<int>(active_set(x).size()) <= k_act);
            CHECK(!x[3]);
            CHECK(!x[12]);
            std::vector<double> service(k_tot, 0.0);
            for (int k = 0; k < k_tot; ++k)
                if (x[k]) service[k] = u(rng);
            st.settle(service);
            for (double q : st.queues) CHECK(q >= 0.0);
            for (double a : st.arrivals) {
                CHECK(a >= 0.0);
                CHECK(a <= 1.0);
            }
        }
        if (!is_fairness_policy(p)) {
            for (double q : st.queues) CHECK(q == 0.0); // baselines keep no queues
        }
    }
}

TEST_CASE("fairness arrivals stay zero for ineligible UEs") {
    Rng rng = make_rng(167);
    SchedulerState st(Policy::PFS, 4, 50.0, 1.0);
    std::vector<std::uint8_t> eligible{1, 0, 1, 1};
    st.decide({1.0, 1.0, 1.0, 1.0}, 2, eligible, rng);
    CHECK(st.arrivals[1] == 0.0);
    CHECK(st.arrivals[0] > 0.0);
}
