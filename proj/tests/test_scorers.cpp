#include <cmath>

#include "doctest.h"
#include "uosr/metrics.hpp"
#include "uosr/rng.hpp"
#include "uosr/scorers.hpp"

using namespace uosr;

namespace {

FeatureMatrix rows(std::size_t r, std::size_t c, std::vector<double> data) {
    return FeatureMatrix{r, c, std::move(data)};
}

FeatureMatrix random_logits(std::size_t r, std::size_t c, std::uint64_t seed,
                            double scale = 3.0) {
    SplitMix64 rng(seed);
    FeatureMatrix m{r, c, {}};
    for (std::size_t i = 0; i < r * c; ++i) m.data.push_back(scale * rng.next_gaussian());
    return m;
}

}  // namespace

TEST_CASE("softmax basics") {
    auto p = softmax(std::vector<double>{0.0, 0.0});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));

    for (double a : {-3.0, 0.0, 17.5})
        for (double t : {0.5, 1.0, 4.0}) {
            auto q = softmax(std::vector<double>{a, a, a}, {t});
            for (double v : q) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        }

    auto scaled = softmax(std::vector<double>{2.0, 0.0}, {2.0});
    auto unit = softmax(std::vector<double>{1.0, 0.0}, {1.0});
    CHECK(scaled[0] == doctest::Approx(unit[0]).epsilon(1e-15));

    // Sums to one even for extreme rows.
    auto big = softmax(std::vector<double>{1000.0, 0.0});
    CHECK(big[0] + big[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("msp examples") {
    CHECK(msp_score(rows(1, 2, {0, 0})).scores[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(msp_score(rows(1, 2, {1000, 0})).scores[0] == doctest::Approx(0.0).epsilon(1e-12));
    double expected = 1.0 - std::exp(1.0) / (std::exp(1.0) + 2.0);
    CHECK(msp_score(rows(1, 3, {1, 0, 0})).scores[0] ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("entropy examples") {
    CHECK(entropy_score(rows(1, 2, {0, 0})).scores[0] ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(entropy_score(rows(1, 2, {1000, 0})).scores[0] == doctest::Approx(0.0));
    // Direct evaluation for (1,0,0).
    double z = std::exp(1.0) + 2.0;
    double p1 = std::exp(1.0) / z, p0 = 1.0 / z;
    double expected = -(p1 * std::log(p1) + 2.0 * p0 * std::log(p0));
    CHECK(entropy_score(rows(1, 3, {1, 0, 0})).scores[0] ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("maxlogit examples") {
    FeatureMatrix m = rows(3, 2, {3, 1, 0, 0, -5, -2});
    auto s = maxlogit_score(m);
    CHECK(s.scores[0] == -3.0);
    CHECK(s.scores[1] == 0.0);
    CHECK(s.scores[2] == 2.0);
}

TEST_CASE("energy examples") {
    CHECK(energy_score(rows(1, 2, {0, 0})).scores[0] ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    CHECK(energy_score(rows(1, 1, {4.5})).scores[0] == doctest::Approx(-4.5));
    CHECK(energy_score(rows(1, 2, {1000, 1000})).scores[0] ==
          doctest::Approx(-1000.0 - std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("gini examples") {
    CHECK(gini_score(rows(1, 2, {0, 0})).scores[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gini_score(rows(1, 2, {1000, 0})).scores[0] == doctest::Approx(0.0).epsilon(1e-9));
    // Logits chosen so softmax = (0.8, 0.2).
    FeatureMatrix m = rows(1, 2, {std::log(0.8), std::log(0.2)});
    CHECK(gini_score(m).scores[0] == doctest::Approx(0.32).epsilon(1e-12));
}

TEST_CASE("predictions: argmax with low-index tie rule, temperature invariant") {
    FeatureMatrix m = rows(2, 2, {0.1, 0.9, 2.0, 2.0});
    auto preds = predictions_from_logits(m);
    CHECK(preds == LabelVector{1, 0});

    FeatureMatrix r = random_logits(50, 6, 11);
    auto base = predictions_from_logits(r);
    for (double t : {0.1, 5.0, 20.0}) {
        FeatureMatrix scaled = r;
        for (double& v : scaled.data) v /= t;
        CHECK(predictions_from_logits(scaled) == base);
    }
}

TEST_CASE("shift invariance of msp, entropy and gini") {
    SplitMix64 rng(5);
    FeatureMatrix m = random_logits(30, 5, 77);
    FeatureMatrix shifted = m;
    for (std::size_t r = 0; r < m.rows; ++r) {
        double c = 10.0 * rng.next_gaussian();
        for (std::size_t j = 0; j < m.cols; ++j) shifted.at(r, j) += c;
    }
    auto close = [](const ScoreVector& a, const ScoreVector& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a.scores[i] == doctest::Approx(b.scores[i]).epsilon(1e-9));
    };
    close(msp_score(m), msp_score(shifted));
    close(entropy_score(m), entropy_score(shifted));
    close(gini_score(m), gini_score(shifted));
}

TEST_CASE("finite outputs for rows with magnitude 1e4") {
    FeatureMatrix m = rows(2, 3, {1e4, -1e4, 0, -1e4, -1e4, -1e4});
    for (const auto& s : {msp_score(m), entropy_score(m), energy_score(m), gini_score(m)}) {
        for (double v : s.scores) CHECK(std::isfinite(v));
    }
    for (double v : maxlogit_score(m).scores) CHECK(std::isfinite(v));
}

TEST_CASE("binary logits: msp, entropy and gini rank identically") {
    FeatureMatrix logits = random_logits(60, 2, 123);
    // First 30 rows play the accept class, rest the reject class.
    auto split = [](const ScoreVector& s) {
        std::vector<double> neg(s.scores.begin(), s.scores.begin() + 30);
        std::vector<double> pos(s.scores.begin() + 30, s.scores.end());
        return std::make_pair(neg, pos);
    };
    auto [mn, mp] = split(msp_score(logits));
    auto [en, ep] = split(entropy_score(logits));
    auto [gn, gp] = split(gini_score(logits));
    double a1 = auroc(mn, mp), a2 = auroc(en, ep), a3 = auroc(gn, gp);
    CHECK(a1 == doctest::Approx(a2).epsilon(1e-12));
    CHECK(a1 == doctest::Approx(a3).epsilon(1e-12));
}

TEST_CASE("score_logits dispatch") {
    FeatureMatrix m = rows(1, 2, {0, 0});
    CHECK(score_logits(&m, "msp").scorer_id == "msp");
    CHECK_THROWS_AS(score_logits(nullptr, "msp"), Error);
    CHECK_THROWS_AS(score_logits(&m, "nope"), Error);
}
