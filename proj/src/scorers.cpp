#include "uosr/scorers.hpp"

#include <algorithm>
#include <cmath>

namespace uosr {

namespace {

void require_temperature(Temperature t) {
    if (!(t.t > 0.0)) raise(errc::bad_spec, "temperature must be positive");
}

void require_nonempty(const FeatureMatrix& logits) {
    if (logits.rows < 1 || logits.cols < 1)
        raise(errc::missing_component, "logit matrix is empty");
}

// Applies fn(row_probabilities) -> score to every row.
template <typename Fn>
ScoreVector map_softmax_rows(const FeatureMatrix& logits, Temperature t, const char* id,
                             Fn fn) {
    require_nonempty(logits);
    require_temperature(t);
    ScoreVector out;
    out.scorer_id = id;
    out.params = {{"t", t.t}};
    out.scores.reserve(logits.rows);
    for (std::size_t r = 0; r < logits.rows; ++r)
        out.scores.push_back(fn(softmax(logits.row(r), t)));
    return out;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits_row, Temperature t) {
    require_temperature(t);
    if (logits_row.empty()) raise(errc::missing_component, "empty logit row");
    double m = logits_row[0];
    for (double v : logits_row) m = std::max(m, v);
    std::vector<double> p(logits_row.size());
    double sum = 0.0;
    for (std::size_t c = 0; c < logits_row.size(); ++c) {
        p[c] = std::exp((logits_row[c] - m) / t.t);
        sum += p[c];
    }
    for (double& v : p) v /= sum;
    return p;
}

ScoreVector msp_score(const FeatureMatrix& logits, Temperature t) {
    return map_softmax_rows(logits, t, "msp", [](const std::vector<double>& p) {
        return 1.0 - *std::max_element(p.begin(), p.end());
    });
}

ScoreVector entropy_score(const FeatureMatrix& logits, Temperature t) {
    return map_softmax_rows(logits, t, "entropy", [](const std::vector<double>& p) {
        double h = 0.0;
        for (double v : p)
            if (v > 0.0) h -= v * std::log(v);
        return h;
    });
}

ScoreVector maxlogit_score(const FeatureMatrix& logits) {
    require_nonempty(logits);
    ScoreVector out;
    out.scorer_id = "maxlogit";
    out.scores.reserve(logits.rows);
    for (std::size_t r = 0; r < logits.rows; ++r) {
        auto row = logits.row(r);
        out.scores.push_back(-*std::max_element(row.begin(), row.end()));
    }
    return out;
}

ScoreVector energy_score(const FeatureMatrix& logits, Temperature t) {
    require_nonempty(logits);
    require_temperature(t);
    ScoreVector out;
    out.scorer_id = "energy";
    out.params = {{"t", t.t}};
    out.scores.reserve(logits.rows);
    for (std::size_t r = 0; r < logits.rows; ++r) {
        auto row = logits.row(r);
        double m = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (double v : row) sum += std::exp((v - m) / t.t);
        out.scores.push_back(-m - t.t * std::log(sum));
    }
    return out;
}

ScoreVector gini_score(const FeatureMatrix& logits, Temperature t) {
    return map_softmax_rows(logits, t, "gini", [](const std::vector<double>& p) {
        double s = 0.0;
        for (double v : p) s += v * v;
        return 1.0 - s;
    });
}

LabelVector predictions_from_logits(const FeatureMatrix& logits) {
    require_nonempty(logits);
    LabelVector preds;
    preds.reserve(logits.rows);
    for (std::size_t r = 0; r < logits.rows; ++r) {
        auto row = logits.row(r);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c)
            if (row[c] > row[best]) best = c;
        preds.push_back(static_cast<std::int64_t>(best));
    }
    return preds;
}

bool is_logit_scorer(std::string_view scorer_id) {
    for (auto id : kLogitScorerIds)
        if (id == scorer_id) return true;
    return false;
}

ScoreVector score_logits(const FeatureMatrix* logits, std::string_view scorer_id,
                         Temperature t) {
    if (!is_logit_scorer(scorer_id))
        raise(errc::bad_spec, "unknown logit scorer '" + std::string(scorer_id) + "'");
    if (logits == nullptr)
        raise(errc::missing_component,
              "scorer '" + std::string(scorer_id) + "' requires logits");
    if (scorer_id == "msp") return msp_score(*logits, t);
    if (scorer_id == "entropy") return entropy_score(*logits, t);
    if (scorer_id == "maxlogit") return maxlogit_score(*logits);
    if (scorer_id == "energy") return energy_score(*logits, t);
    return gini_score(*logits, t);
}

}  // namespace uosr
