#include "uosr/fusion.hpp"

#include <cmath>

namespace uosr {

namespace {

// Overflow-safe logistic: exp is only ever taken of a non-positive argument.
double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

void check_lengths(const ScoreVector& u0, const ScoreVector& u1) {
    if (u0.size() != u1.size())
        raise(errc::length_mismatch, "u0 has " + std::to_string(u0.size()) + " scores, u1 has " +
                                         std::to_string(u1.size()));
}

}  // namespace

RefStats ref_stats(const ScoreVector& ref_uncertainties) {
    const auto& u = ref_uncertainties.scores;
    if (u.empty()) raise(errc::empty_input, "no reference uncertainties");
    RefStats s;
    s.n = u.size();
    double sum = 0.0;
    for (double v : u) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    double sq = 0.0;
    for (double v : u) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(s.n));
    return s;
}

double select_lambda(const RefStats& s, double beta) { return s.mean - beta * s.std; }

ScoreVector fsknns_fuse(const ScoreVector& u0, const ScoreVector& u1, const FusionParams& p) {
    check_lengths(u0, u1);
    if (!(p.alpha > 0.0)) raise(errc::bad_spec, "alpha must be positive");
    ScoreVector out;
    out.scorer_id = "fsknns";
    out.params = {{"alpha", p.alpha}, {"beta", p.beta}, {"lambda", p.lambda}};
    out.scores.reserve(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) {
        double w = sigmoid(p.alpha * (u1.scores[i] - p.lambda));
        out.scores.push_back(u0.scores[i] + w * u1.scores[i]);
    }
    return out;
}

ScoreVector additive_fuse(const ScoreVector& u0, const ScoreVector& u1) {
    check_lengths(u0, u1);
    ScoreVector out;
    out.scorer_id = "fsknn+s";
    out.scores.reserve(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i)
        out.scores.push_back(u0.scores[i] + u1.scores[i]);
    return out;
}

ScoreVector multiplicative_fuse(const ScoreVector& u0, const ScoreVector& u1) {
    check_lengths(u0, u1);
    ScoreVector out;
    out.scorer_id = "fsknn*s";
    out.scores.reserve(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i)
        out.scores.push_back(u0.scores[i] * u1.scores[i]);
    return out;
}

}  // namespace uosr
