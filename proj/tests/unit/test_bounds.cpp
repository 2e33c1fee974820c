#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dpotts/bounds.hpp"

using namespace dpotts;

TEST_CASE("hashing bound known values") {
    CHECK(hashing_bound(2) == Catch::Approx(0.110028).margin(1e-4));
    CHECK(hashing_bound(3) == Catch::Approx(0.1595).margin(5e-4));
}

TEST_CASE("hashing bound root satisfies the defining equation") {
    for (int d : {2, 3, 4, 6, 10, 25}) {
        const double p = hashing_bound(d);
        CHECK(hashing_entropy(d, p) == Catch::Approx(0.5 * std::log(d)).margin(1e-9));
        CHECK(p > 0.0);
        CHECK(p < static_cast<double>(d - 1) / d);
    }
}

TEST_CASE("hashing bound grows monotonically with d") {
    double prev = 0.0;
    for (int d : {2, 3, 4, 6, 10}) {
        const double p = hashing_bound(d);
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("base independence of the hashing equation") {
    // both sides scale by 1/ln 2 in base 2, so the root must agree
    const int d = 6;
    const double target2 = 0.5 * std::log2(d);
    double lo = 1e-12, hi = static_cast<double>(d - 1) / d - 1e-12;
    auto lhs2 = [&](double p) {
        double h = p * std::log2(static_cast<double>(d - 1));
        if (p > 0) h -= p * std::log2(p);
        if (p < 1) h -= (1 - p) * std::log2(1 - p);
        return h;
    };
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (lhs2(mid) < target2 ? lo : hi) = mid;
    }
    CHECK(hashing_bound(d) == Catch::Approx(0.5 * (lo + hi)).margin(1e-9));
}

TEST_CASE("upper bound closed forms") {
    CHECK(upper_bound(2) == Catch::Approx(0.146446609).margin(1e-8));
    CHECK(upper_bound(3) == Catch::Approx(0.211324865).margin(1e-8));
    // d -> infinity limit is 1/2
    CHECK(upper_bound(1000000) == Catch::Approx(0.5).margin(1e-3));
}

TEST_CASE("hashing bound sits below the analytic upper bound") {
    for (int d : {2, 3, 4, 6, 10}) CHECK(hashing_bound(d) < upper_bound(d));
}

TEST_CASE("lower bound composition") {
    const double p2 = 0.110028, p3 = 0.1595;
    const double lb = lower_bound(p2, p3, 2, 3);
    CHECK(lb == Catch::Approx(std::min(p2 * 5.0 / 3.0, p3 * 5.0 / 4.0)).margin(1e-12));
    CHECK(lb == Catch::Approx(0.18338).margin(1e-4));
    CHECK(lb <= hashing_bound(6));

    CHECK(lower_bound(0.0, 0.0, 2, 3) == 0.0);
    CHECK_THROWS_AS(lower_bound(0.1, 0.1, 2, 4), std::invalid_argument);  // not co-prime
    CHECK_THROWS_AS(lower_bound(0.1, 0.1, 1, 3), std::invalid_argument);
}

TEST_CASE("self-consistency of the hashing values") {
    const auto hb = [](int d) { return hashing_bound(d); };
    for (int n : {2, 3, 5}) {
        const auto r = self_consistency(hb, n);
        INFO("n=" << n << " lhs=" << r.lhs << " rhs=" << r.rhs);
        CHECK(r.pass);
        CHECK(r.margin > 0.0);
    }
    CHECK_THROWS_AS(self_consistency(hb, 4), std::invalid_argument);  // not prime
}

TEST_CASE("a constant threshold family fails self-consistency") {
    const auto r = self_consistency([](int) { return 0.1; }, 3);
    CHECK_FALSE(r.pass);
}
