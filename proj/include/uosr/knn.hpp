#pragma once

#include <span>

#include "uosr/types.hpp"

namespace uosr {

/// Immutable similarity bank. Rows are unit-normalized at construction (zero
/// rows rejected) and the original norms cached; shareable across workers.
class SimilarityBank {
public:
    explicit SimilarityBank(FeatureMatrix features);

    std::size_t rows() const { return features_.rows; }
    std::size_t cols() const { return features_.cols; }
    /// Row r scaled to unit Euclidean norm.
    std::span<const double> unit_row(std::size_t r) const { return features_.row(r); }
    double norm(std::size_t r) const { return norms_[r]; }

private:
    FeatureMatrix features_;
    std::vector<double> norms_;
};

struct KnnParams {
    std::size_t k = 5;
};

/// Dot product in a fixed four-lane accumulation order. Every similarity in
/// this module goes through this kernel, so results are identical at any
/// thread count and against the full-sort test oracle.
double fixed_order_dot(std::span<const double> a, std::span<const double> b);

/// Cosine of query against bank row r.
double cosine_similarity(std::span<const double> query, double query_norm,
                         const SimilarityBank& bank, std::size_t r);

/// K-th largest cosine similarity between query and the bank rows. The K-th
/// largest is taken over the multiset: duplicates count separately. Exact
/// selection (nth_element), never approximate.
double topk_similarity(std::span<const double> query, const SimilarityBank& bank,
                       std::size_t k);

/// Per row: u = 1 - topK(similarities to train bank). k is clamped to the
/// bank size (k_eff = min(k, rows), echoed in params).
ScoreVector knn_score(const FeatureMatrix& test, const SimilarityBank& train_bank,
                      KnnParams p, unsigned n_threads = 1);

/// Per row: u = 1 - topK(train similarities) + topK(reference similarities).
/// k is clamped per bank; both effective values are echoed in params.
ScoreVector fsknn_score(const FeatureMatrix& test, const SimilarityBank& train_bank,
                        const SimilarityBank& ref_bank, KnnParams p,
                        unsigned n_threads = 1);

}  // namespace uosr
