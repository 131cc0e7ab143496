#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uosr/error.hpp"

namespace uosr {

/// Dense row-major matrix of embeddings or logits. Values are stored on disk
/// at 32-bit precision; in memory everything is computed at 64-bit.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major, rows * cols entries

    std::span<const double> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

using LabelVector = std::vector<std::int64_t>;

/// Per-sample scalar uncertainty, higher = more uncertain. Carries the id of
/// the scorer that produced it and the hyperparameters it ran with.
struct ScoreVector {
    std::vector<double> scores;
    std::string scorer_id;
    std::vector<std::pair<std::string, double>> params;

    std::size_t size() const { return scores.size(); }
};

/// Stack b below a. Both must share the column count.
FeatureMatrix vstack(const FeatureMatrix& a, const FeatureMatrix& b);

}  // namespace uosr
