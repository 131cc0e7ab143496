#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "uosr/types.hpp"

namespace uosr {

struct Temperature {
    double t = 1.0;
};

/// Numerically stable softmax of one logit row divided by t (shift by the row
/// max before exponentiation).
std::vector<double> softmax(std::span<const double> logits_row, Temperature t = {});

// Logit-space uncertainty scorers. All emit "higher = more uncertain" and use
// natural logarithms.

/// u = 1 - max_c softmax(row / t).
ScoreVector msp_score(const FeatureMatrix& logits, Temperature t = {});

/// Shannon entropy of the softmax distribution, u in [0, ln C].
ScoreVector entropy_score(const FeatureMatrix& logits, Temperature t = {});

/// u = -max_c logit_c (temperature-free).
ScoreVector maxlogit_score(const FeatureMatrix& logits);

/// Free energy u = -t * log sum_c exp(logit_c / t), log-sum-exp stabilized.
ScoreVector energy_score(const FeatureMatrix& logits, Temperature t = {});

/// Gini impurity of the softmax distribution, u = 1 - sum_c p_c^2.
ScoreVector gini_score(const FeatureMatrix& logits, Temperature t = {});

/// Argmax per row; ties break toward the lowest class index.
LabelVector predictions_from_logits(const FeatureMatrix& logits);

inline constexpr std::string_view kLogitScorerIds[] = {"msp", "entropy", "maxlogit",
                                                       "energy", "gini"};

bool is_logit_scorer(std::string_view scorer_id);

/// Dispatch by scorer id. Throws MissingComponent when logits is null and
/// BadSpec for an unknown id.
ScoreVector score_logits(const FeatureMatrix* logits, std::string_view scorer_id,
                         Temperature t = {});

}  // namespace uosr
