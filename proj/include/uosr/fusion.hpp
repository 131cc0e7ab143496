#pragma once

#include "uosr/types.hpp"

namespace uosr {

/// Hyperparameters of the sigmoid-gated fusion. lambda is normally computed
/// from reference statistics (select_lambda), not set by hand.
struct FusionParams {
    double alpha = 50.0;
    double beta = 1.0;
    double lambda = 0.0;
};

struct RefStats {
    double mean = 0.0;
    double std = 0.0;  // population convention (divide by n), defined at n = 1
    std::size_t n = 0;
};

RefStats ref_stats(const ScoreVector& ref_uncertainties);

/// lambda = mean - beta * std.
double select_lambda(const RefStats& s, double beta);

/// Elementwise u = u0 + w * u1 with w = sigmoid(alpha * (u1 - lambda)).
/// The sigmoid is computed overflow-safe for arguments up to |1e4|.
ScoreVector fsknns_fuse(const ScoreVector& u0, const ScoreVector& u1,
                        const FusionParams& p);

/// Elementwise u0 + u1, raw scores, no normalization.
ScoreVector additive_fuse(const ScoreVector& u0, const ScoreVector& u1);

/// Elementwise u0 * u1, raw scores, no normalization.
ScoreVector multiplicative_fuse(const ScoreVector& u0, const ScoreVector& u1);

}  // namespace uosr
