#include <cmath>

#include "doctest.h"
#include "uosr/metrics.hpp"
#include "uosr/scorers.hpp"
#include "uosr/synth.hpp"

using namespace uosr;

TEST_CASE("gen_scores: point specs behave as stated") {
    GroupSpec inc{100, PointDist{0.1}, {}};
    GroupSpec inw{50, PointDist{0.9}, {}};
    GroupSpec ood{100, PointDist{0.9}, {}};
    auto [scores, outcomes] = gen_scores(inc, inw, ood, 7);
    CHECK(outcomes.n_inc == 100);
    CHECK(outcomes.n_inw == 50);
    CHECK(outcomes.n_ood == 100);
    auto r = evaluate(scores, outcomes);
    CHECK(*r.auroc_uosr == 1.0);
}

TEST_CASE("gen_scores: overlapping InW and OoD gaussians stay near chance") {
    GroupSpec inc{2000, GaussianDist{0.2, 0.05}, {}};
    GroupSpec inw{2000, GaussianDist{0.7, 0.1}, {}};
    GroupSpec ood{2000, GaussianDist{0.7, 0.1}, {}};
    auto [scores, outcomes] = gen_scores(inc, inw, ood, 11);
    auto r = evaluate(scores, outcomes);
    CHECK(*r.auroc_inw_ood > 0.45);
    CHECK(*r.auroc_inw_ood < 0.55);
}

TEST_CASE("gen_scores: identical specs for all groups give chance everywhere") {
    GroupSpec g{1500, GaussianDist{0.5, 0.2}, {}};
    auto [scores, outcomes] = gen_scores(g, g, g, 23);
    auto r = evaluate(scores, outcomes);
    for (double v : {*r.auroc_inc_inw, *r.auroc_inc_ood, *r.auroc_inw_ood}) {
        CHECK(v > 0.47);
        CHECK(v < 0.53);
    }
}

TEST_CASE("gen_scores: determinism, clipping, beta draws") {
    GroupSpec inc{200, BetaDist{2.0, 5.0}, {}};
    GroupSpec inw{200, GaussianDist{0.5, 0.3}, {{0.0, 1.0}}};
    GroupSpec ood{0, PointDist{1.0}, {}};
    auto [a, oa] = gen_scores(inc, inw, ood, 99);
    auto [b, ob] = gen_scores(inc, inw, ood, 99);
    CHECK(a.scores == b.scores);
    CHECK(oa.n_ood == 0);
    for (double v : a.scores) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    auto [c, oc] = gen_scores(inc, inw, ood, 100);
    CHECK(a.scores != c.scores);

    GroupSpec bad{10, BetaDist{-1.0, 2.0}, {}};
    CHECK_THROWS_AS(gen_scores(bad, inw, ood, 0), Error);
}

TEST_CASE("gen_bundle: centers, wrong-center clusters and the logit model") {
    std::vector<ClusterSpec> train{
        {50, {5, 0}, 0.2, 0},
        {50, {0, 5}, 0.2, 1},
    };
    SUBCASE("test points exactly at their class centers are all InC") {
        std::vector<ClusterSpec> test{{40, {5, 0}, 0.0, 0}, {40, {0, 5}, 0.0, 1}};
        std::vector<ClusterSpec> ood{{10, {4, 4}, 0.0, 9}};
        auto b = gen_bundle(train, test, ood, 5);
        auto preds = predictions_from_logits(*b.test_logits);
        auto o = classify_outcomes(preds, b.test_labels, b.ood_features.rows);
        CHECK(closed_set_accuracy(o) == 1.0);
    }
    SUBCASE("an InD cluster placed at the wrong-class center is all InW") {
        std::vector<ClusterSpec> test{{30, {0, 5}, 0.0, 0}};  // class 0 at class 1's center
        std::vector<ClusterSpec> ood{{10, {4, 4}, 0.0, 9}};
        auto b = gen_bundle(train, test, ood, 5);
        auto preds = predictions_from_logits(*b.test_logits);
        auto o = classify_outcomes(preds, b.test_labels, b.ood_features.rows);
        CHECK(o.n_inw == 30);
        CHECK(o.n_inc == 0);
    }
    SUBCASE("argmax of the synthesized logits is the nearest center") {
        std::vector<ClusterSpec> test{{60, {2.5, 2.5}, 1.5, 0}};
        std::vector<ClusterSpec> ood{{5, {4, 4}, 0.1, 9}};
        auto b = gen_bundle(train, test, ood, 8);
        auto preds = predictions_from_logits(*b.test_logits);
        for (std::size_t i = 0; i < b.test_features.rows; ++i) {
            auto x = b.test_features.row(i);
            double d0 = std::hypot(x[0] - 5.0, x[1] - 0.0);
            double d1 = std::hypot(x[0] - 0.0, x[1] - 5.0);
            std::int64_t nearest = d1 < d0 ? 1 : 0;
            CHECK(preds[i] == nearest);
        }
    }
    SUBCASE("group sizes match the specs exactly") {
        std::vector<ClusterSpec> test{{17, {5, 0}, 0.3, 0}};
        std::vector<ClusterSpec> ood{{13, {4, 4}, 0.3, 9}, {11, {-4, 4}, 0.3, 10}};
        auto b = gen_bundle(train, test, ood, 2);
        CHECK(b.train_features->rows == 100);
        CHECK(b.test_features.rows == 17);
        CHECK(b.ood_features.rows == 24);
        CHECK(b.ood_class_ids->size() == 24);
    }
    SUBCASE("bad specs are rejected") {
        std::vector<ClusterSpec> test{{10, {5, 0}, 0.1, 0}};
        std::vector<ClusterSpec> ood{{10, {4, 4}, 0.1, 9}};
        std::vector<ClusterSpec> zero_center{{10, {0, 0}, 0.0, 0}, {10, {0, 5}, 0.1, 1}};
        CHECK_THROWS_AS(gen_bundle(zero_center, test, ood, 0), Error);
        std::vector<ClusterSpec> gap_ids{{10, {5, 0}, 0.1, 0}, {10, {0, 5}, 0.1, 2}};
        CHECK_THROWS_AS(gen_bundle(gap_ids, test, ood, 0), Error);
    }
    SUBCASE("determinism under seed") {
        std::vector<ClusterSpec> test{{25, {5, 0}, 0.4, 0}};
        std::vector<ClusterSpec> ood{{25, {4, 4}, 0.4, 9}};
        auto b1 = gen_bundle(train, test, ood, 77);
        auto b2 = gen_bundle(train, test, ood, 77);
        CHECK(b1.test_features.data == b2.test_features.data);
        CHECK(b1.ood_logits->data == b2.ood_logits->data);
    }
}

TEST_CASE("calibration scenarios") {
    auto scenarios = calibration_scenarios(3);
    REQUIRE(scenarios.size() == 5);
    for (const auto& s : scenarios) CHECK(s.confidence.size() == 100);

    auto sp_auroc = [](const CalibrationScenario& s) {
        std::vector<double> neg, pos;  // uncertainty = 1 - confidence
        for (std::size_t i = 0; i < s.confidence.size(); ++i)
            (s.correct[i] ? neg : pos).push_back(1.0 - s.confidence[i]);
        return auroc(neg, pos);
    };
    auto scenario_ece = [](const CalibrationScenario& s) {
        return ece(s.confidence, s.correct, 15);
    };

    SUBCASE("scenario a: matching per-bin accuracy, zero ECE, chance AUROC") {
        CHECK(scenario_ece(scenarios[0]) == 0.0);
        CHECK(sp_auroc(scenarios[0]) < 1.0);
    }
    SUBCASE("scenario b: perfect separation but overconfident bins") {
        CHECK(sp_auroc(scenarios[1]) == 1.0);
        CHECK(scenario_ece(scenarios[1]) > 0.2);
    }
    SUBCASE("the ECE ordering disagrees with the SP-AUROC ordering somewhere") {
        bool disagreement = false;
        for (std::size_t i = 0; i < scenarios.size() && !disagreement; ++i)
            for (std::size_t j = i + 1; j < scenarios.size() && !disagreement; ++j) {
                double ei = scenario_ece(scenarios[i]), ej = scenario_ece(scenarios[j]);
                double ai = sp_auroc(scenarios[i]), aj = sp_auroc(scenarios[j]);
                // Lower ECE is better, higher AUROC is better.
                if ((ei < ej && ai < aj) || (ei > ej && ai > aj)) disagreement = true;
            }
        CHECK(disagreement);
    }
    SUBCASE("determinism under seed") {
        auto again = calibration_scenarios(3);
        for (std::size_t i = 0; i < scenarios.size(); ++i)
            CHECK(scenarios[i].confidence == again[i].confidence);
    }
}
