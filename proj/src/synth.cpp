#include "uosr/synth.hpp"

#include <algorithm>
#include <cmath>

#include "uosr/rng.hpp"
#include "uosr/scorers.hpp"

namespace uosr {

namespace {

constexpr std::uint64_t kScoreStream = 0x73636f7265ULL;    // "score"
constexpr std::uint64_t kFeatureStream = 0x66656174ULL;    // "feat"

// Marsaglia-Tsang gamma sampler, shape >= 1 branch plus the boost for a < 1.
double draw_gamma(SplitMix64& rng, double shape) {
    if (shape < 1.0) {
        double u = rng.next_double_open();
        return draw_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = rng.next_gaussian();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = rng.next_double_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double draw_score(SplitMix64& rng, const ScoreDist& dist) {
    if (const auto* g = std::get_if<GaussianDist>(&dist))
        return g->mu + g->sigma * rng.next_gaussian();
    if (const auto* b = std::get_if<BetaDist>(&dist)) {
        double x = draw_gamma(rng, b->a);
        double y = draw_gamma(rng, b->b);
        return x / (x + y);
    }
    return std::get<PointDist>(dist).v;
}

void check_spec(const GroupSpec& g, const char* name) {
    if (const auto* gauss = std::get_if<GaussianDist>(&g.dist)) {
        if (gauss->sigma < 0.0) raise(errc::bad_spec, std::string(name) + ": sigma < 0");
    } else if (const auto* beta = std::get_if<BetaDist>(&g.dist)) {
        if (!(beta->a > 0.0) || !(beta->b > 0.0))
            raise(errc::bad_spec, std::string(name) + ": beta params must be positive");
    }
    if (g.clip && g.clip->first > g.clip->second)
        raise(errc::bad_spec, std::string(name) + ": clip lo > hi");
}

}  // namespace

std::pair<ScoreVector, OutcomeVector> gen_scores(const GroupSpec& inc, const GroupSpec& inw,
                                                 const GroupSpec& ood, std::uint64_t seed) {
    check_spec(inc, "inc");
    check_spec(inw, "inw");
    check_spec(ood, "ood");
    if (inc.n + inw.n + ood.n < 1) raise(errc::bad_spec, "total sample count is zero");

    ScoreVector scores;
    scores.scorer_id = "synthetic";
    OutcomeVector outcomes;
    const GroupSpec* specs[3] = {&inc, &inw, &ood};
    const Outcome tags[3] = {Outcome::inc, Outcome::inw, Outcome::ood};
    for (int g = 0; g < 3; ++g) {
        for (std::size_t i = 0; i < specs[g]->n; ++i) {
            SplitMix64 rng(mix_key(seed, kScoreStream + static_cast<std::uint64_t>(g), i));
            double v = draw_score(rng, specs[g]->dist);
            if (specs[g]->clip) v = std::clamp(v, specs[g]->clip->first, specs[g]->clip->second);
            scores.scores.push_back(v);
            outcomes.outcomes.push_back(tags[g]);
        }
    }
    outcomes.n_inc = inc.n;
    outcomes.n_inw = inw.n;
    outcomes.n_ood = ood.n;
    return {std::move(scores), std::move(outcomes)};
}

namespace {

void check_cluster(const ClusterSpec& c, const char* section) {
    if (c.center.empty()) raise(errc::bad_spec, std::string(section) + ": empty center");
    double norm_sq = 0.0;
    for (double v : c.center) norm_sq += v * v;
    if (norm_sq == 0.0)
        raise(errc::bad_spec, std::string(section) + ": cluster center must be nonzero");
    if (c.spread < 0.0) raise(errc::bad_spec, std::string(section) + ": spread < 0");
}

// One feature row: center + spread * N(0, I), one stream per sample.
std::vector<double> draw_point(const ClusterSpec& c, std::uint64_t seed, std::uint64_t stream,
                               std::size_t index) {
    SplitMix64 rng(mix_key(seed, stream, index));
    std::vector<double> x(c.center);
    if (c.spread > 0.0)
        for (double& v : x) v += c.spread * rng.next_gaussian();
    return x;
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

EvaluationBundle gen_bundle(std::span<const ClusterSpec> train,
                            std::span<const ClusterSpec> test_ind,
                            std::span<const ClusterSpec> ood, std::uint64_t seed) {
    if (train.empty()) raise(errc::bad_spec, "need at least one train cluster");
    if (test_ind.empty()) raise(errc::bad_spec, "need at least one test cluster");
    if (ood.empty()) raise(errc::bad_spec, "need at least one ood cluster");

    std::size_t dim = train.front().center.size();
    for (auto section : {train, test_ind, ood})
        for (const auto& c : section)
            if (c.center.size() != dim) raise(errc::dim_mismatch, "cluster dims disagree");

    // Canonical class centers: first train spec of each class id, ids 0..C-1.
    std::vector<const ClusterSpec*> centers;
    for (const auto& c : train) {
        check_cluster(c, "train");
        if (c.class_id < 0) raise(errc::bad_spec, "train class ids must be >= 0");
        std::size_t id = static_cast<std::size_t>(c.class_id);
        if (id >= centers.size()) centers.resize(id + 1, nullptr);
        if (centers[id] == nullptr) centers[id] = &c;
    }
    for (std::size_t id = 0; id < centers.size(); ++id)
        if (centers[id] == nullptr)
            raise(errc::bad_spec, "train class ids must cover 0..C-1, missing " +
                                      std::to_string(id));
    std::size_t n_classes = centers.size();

    auto logits_for = [&](std::span<const double> x) {
        std::vector<double> row(n_classes);
        for (std::size_t c = 0; c < n_classes; ++c)
            row[c] = -distance(x, centers[c]->center);
        return row;
    };

    EvaluationBundle b;
    FeatureMatrix train_feats{0, dim, {}};
    LabelVector train_labels;
    std::uint64_t stream = kFeatureStream;
    for (const auto& c : train) {
        for (std::size_t i = 0; i < c.n; ++i) {
            auto x = draw_point(c, seed, stream, i);
            train_feats.data.insert(train_feats.data.end(), x.begin(), x.end());
            train_labels.push_back(c.class_id);
        }
        train_feats.rows += c.n;
        ++stream;
    }

    FeatureMatrix test_feats{0, dim, {}};
    FeatureMatrix test_logits{0, n_classes, {}};
    LabelVector test_labels;
    for (const auto& c : test_ind) {
        check_cluster(c, "test");
        if (c.class_id < 0 || static_cast<std::size_t>(c.class_id) >= n_classes)
            raise(errc::label_out_of_range, "test cluster class id outside [0, C)");
        for (std::size_t i = 0; i < c.n; ++i) {
            auto x = draw_point(c, seed, stream, i);
            auto l = logits_for(x);
            test_feats.data.insert(test_feats.data.end(), x.begin(), x.end());
            test_logits.data.insert(test_logits.data.end(), l.begin(), l.end());
            test_labels.push_back(c.class_id);
        }
        test_feats.rows += c.n;
        test_logits.rows += c.n;
        ++stream;
    }

    FeatureMatrix ood_feats{0, dim, {}};
    FeatureMatrix ood_logits{0, n_classes, {}};
    LabelVector ood_ids;
    for (const auto& c : ood) {
        check_cluster(c, "ood");
        for (std::size_t i = 0; i < c.n; ++i) {
            auto x = draw_point(c, seed, stream, i);
            auto l = logits_for(x);
            ood_feats.data.insert(ood_feats.data.end(), x.begin(), x.end());
            ood_logits.data.insert(ood_logits.data.end(), l.begin(), l.end());
            ood_ids.push_back(c.class_id);
        }
        ood_feats.rows += c.n;
        ood_logits.rows += c.n;
        ++stream;
    }

    if (test_feats.rows == 0) raise(errc::bad_spec, "test section has no samples");
    if (ood_feats.rows == 0) raise(errc::bad_spec, "ood section has no samples");
    if (train_feats.rows == 0) raise(errc::bad_spec, "train section has no samples");

    b.train_features = std::move(train_feats);
    b.train_labels = std::move(train_labels);
    b.test_features = std::move(test_feats);
    b.test_logits = std::move(test_logits);
    b.test_labels = std::move(test_labels);
    b.ood_features = std::move(ood_feats);
    b.ood_logits = std::move(ood_logits);
    b.ood_class_ids = std::move(ood_ids);
    return b;
}

std::vector<CalibrationScenario> calibration_scenarios(std::uint64_t seed) {
    // Point-mass layouts, 80 InC + 20 InW each. InC stays put; the InW
    // placement moves. (a) matches per-bin accuracy exactly, so its ECE is 0
    // while its ranking power is nil; (b) separates perfectly but is
    // overconfident in both bins.
    struct Block {
        double conf;
        std::size_t n;
        bool correct;
    };
    struct Layout {
        const char* id;
        std::vector<Block> blocks;
    };
    std::vector<Layout> layouts = {
        {"a", {{0.8, 80, true}, {0.8, 20, false}}},
        {"b", {{0.8, 80, true}, {0.6, 20, false}}},
        {"c", {{0.9, 80, true}, {0.1, 20, false}}},
        {"d", {{0.9, 50, true}, {0.7, 30, true}, {0.7, 10, false}, {0.5, 10, false}}},
        {"e", {{0.95, 80, true}, {0.05, 20, false}}},
    };

    std::vector<CalibrationScenario> out;
    for (std::size_t s = 0; s < layouts.size(); ++s) {
        CalibrationScenario scenario;
        scenario.id = layouts[s].id;
        for (const auto& blk : layouts[s].blocks)
            for (std::size_t i = 0; i < blk.n; ++i) {
                scenario.confidence.push_back(blk.conf);
                scenario.correct.push_back(blk.correct ? 1 : 0);
            }
        // Seeded sample order; every metric downstream is order-invariant.
        std::vector<std::size_t> order(scenario.confidence.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        SplitMix64 rng(mix_key(seed, 0x63616c6962ULL, s));  // "calib"
        seeded_shuffle(std::span<std::size_t>(order), rng);
        CalibrationScenario shuffled;
        shuffled.id = scenario.id;
        for (std::size_t i : order) {
            shuffled.confidence.push_back(scenario.confidence[i]);
            shuffled.correct.push_back(scenario.correct[i]);
        }
        out.push_back(std::move(shuffled));
    }
    return out;
}

}  // namespace uosr
