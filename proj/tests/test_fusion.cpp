#include <cmath>

#include "doctest.h"
#include "uosr/fusion.hpp"
#include "uosr/rng.hpp"

using namespace uosr;

namespace {

ScoreVector sv(std::vector<double> values) {
    ScoreVector s;
    s.scores = std::move(values);
    return s;
}

double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("ref_stats uses the population convention") {
    RefStats a = ref_stats(sv({1, 1, 1}));
    CHECK(a.mean == doctest::Approx(1.0));
    CHECK(a.std == doctest::Approx(0.0));

    RefStats b = ref_stats(sv({0, 2}));
    CHECK(b.mean == doctest::Approx(1.0));
    CHECK(b.std == doctest::Approx(1.0));

    RefStats c = ref_stats(sv({5}));
    CHECK(c.mean == doctest::Approx(5.0));
    CHECK(c.std == doctest::Approx(0.0));
    CHECK(c.n == 1);

    CHECK_THROWS_AS(ref_stats(sv({})), Error);
}

TEST_CASE("select_lambda") {
    CHECK(select_lambda({1.0, 0.2, 3}, 1.0) == doctest::Approx(0.8));
    CHECK(select_lambda({1.0, 0.2, 3}, 0.0) == doctest::Approx(1.0));
    CHECK(select_lambda({1.0, 2.0, 3}, -0.5) == doctest::Approx(2.0));
    // Monotone non-increasing in beta when the spread is positive.
    double prev = select_lambda({1.0, 0.3, 4}, -0.5);
    for (double beta : {0.0, 0.5, 1.0, 1.5}) {
        double l = select_lambda({1.0, 0.3, 4}, beta);
        CHECK(l < prev);
        prev = l;
    }
}

TEST_CASE("fsknns_fuse examples") {
    SUBCASE("u1 at the threshold gets half weight") {
        auto fused = fsknns_fuse(sv({0.3}), sv({0.5}), {50.0, 1.0, 0.5});
        CHECK(fused.scores[0] == doctest::Approx(0.3 + 0.5 * 0.5).epsilon(1e-12));
    }
    SUBCASE("u1 = 0 contributes exactly nothing") {
        auto fused = fsknns_fuse(sv({0.2}), sv({0.0}), {50.0, 1.0, 0.5});
        CHECK(fused.scores[0] == 0.2);
    }
    SUBCASE("u1 far above the threshold gets full weight") {
        auto fused = fsknns_fuse(sv({0.2}), sv({1.0}), {50.0, 1.0, 0.5});
        CHECK(fused.scores[0] == doctest::Approx(0.2 + sigmoid_ref(25.0) * 1.0).epsilon(1e-12));
        CHECK(fused.scores[0] == doctest::Approx(1.2).epsilon(1e-8));
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(fsknns_fuse(sv({1, 2}), sv({1}), {}), Error);
    }
}

TEST_CASE("gating limits at |alpha (u1 - lambda)| = 50") {
    // Far below lambda the fused score collapses to u0.
    auto low = fsknns_fuse(sv({0.4}), sv({-1.0 + 0.5}), {50.0, 1.0, 0.5});
    CHECK(low.scores[0] == doctest::Approx(0.4).epsilon(1e-9));
    // Far above, the full u1 is added.
    auto high = fsknns_fuse(sv({0.4}), sv({1.5}), {50.0, 1.0, 0.5});
    CHECK(high.scores[0] == doctest::Approx(0.4 + 1.5).epsilon(1e-9));
    // Overflow-safe deep into both tails.
    auto extreme = fsknns_fuse(sv({0.0, 0.0}), sv({-200.0, 200.0}), {50.0, 1.0, 0.0});
    CHECK(std::isfinite(extreme.scores[0]));
    CHECK(extreme.scores[0] == doctest::Approx(0.0));
    CHECK(extreme.scores[1] == doctest::Approx(200.0));
}

TEST_CASE("fsknns is monotone in u0 at fixed u1") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        double u1 = 4.0 * rng.next_double() - 1.0;
        double a = rng.next_gaussian(), b = a + rng.next_double();
        FusionParams p{50.0, 1.0, rng.next_double()};
        double fa = fsknns_fuse(sv({a}), sv({u1}), p).scores[0];
        double fb = fsknns_fuse(sv({b}), sv({u1}), p).scores[0];
        CHECK(fb >= fa);
    }
}

TEST_CASE("below-threshold samples keep the u0 ordering up to weight leakage") {
    double alpha = 50.0, lambda = 0.8;
    double margin = 5.0 / alpha;
    // Both u1 values at least 5/alpha below lambda.
    double u1a = lambda - margin, u1b = lambda - 2.0 * margin;
    double leak = sigmoid_ref(-5.0) * std::max(std::abs(u1a), std::abs(u1b));
    double u0a = 0.40, u0b = 0.40 + 3.0 * leak;  // gap exceeds twice the leakage
    auto fused = fsknns_fuse(sv({u0a, u0b}), sv({u1a, u1b}), {alpha, 1.0, lambda});
    CHECK(fused.scores[1] > fused.scores[0]);
}

TEST_CASE("additive and multiplicative fusion") {
    auto add = additive_fuse(sv({0.3, 0.1}), sv({0.4, 0.0}));
    CHECK(add.scores == std::vector<double>{0.7, 0.1});
    auto add_rev = additive_fuse(sv({0.4, 0.0}), sv({0.3, 0.1}));
    CHECK(add.scores == add_rev.scores);

    auto mul = multiplicative_fuse(sv({0.5, 0.9}), sv({0.4, 0.0}));
    CHECK(mul.scores[0] == doctest::Approx(0.2));
    CHECK(mul.scores[1] == 0.0);
    auto ident = multiplicative_fuse(sv({0.5, 0.9}), sv({1.0, 1.0}));
    CHECK(ident.scores == std::vector<double>{0.5, 0.9});

    CHECK_THROWS_AS(additive_fuse(sv({1}), sv({1, 2})), Error);
    CHECK_THROWS_AS(multiplicative_fuse(sv({1}), sv({1, 2})), Error);
}
