#pragma once

#include "uosr/fewshot.hpp"

namespace uosr {

/// Grid axes; an empty axis falls back to the base config value.
struct SweepGrid {
    std::vector<std::size_t> ks;
    std::vector<double> alphas;
    std::vector<double> betas;
};

struct SweepCell {
    std::size_t k = 0;
    double alpha = 0.0;
    double beta = 0.0;
    MetricReport mean;          // fsknns mean report of this cell
    double mean_lambda = 0.0;   // mean gate threshold across repeats
};

/// One run_fewshot per cell with only the swept parameters changed. The seed
/// is shared across cells so reference draws are identical everywhere; cells
/// are ordered lexicographically by (k, alpha, beta).
std::vector<SweepCell> sweep(const EvaluationBundle& bundle, const FewShotConfig& base_cfg,
                             const SweepGrid& grid);

std::string sweep_to_csv(std::span<const SweepCell> cells);
std::string sweep_to_json(std::span<const SweepCell> cells);

}  // namespace uosr
