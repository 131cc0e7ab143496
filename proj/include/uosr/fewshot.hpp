#pragma once

#include <cstdint>

#include "uosr/fusion.hpp"
#include "uosr/knn.hpp"
#include "uosr/metrics.hpp"
#include "uosr/scorers.hpp"
#include "uosr/tensorio.hpp"

namespace uosr {

struct FewShotConfig {
    std::size_t shots = 5;          // reference samples drawn per OoD class
    KnnParams knn{5};
    FusionParams fusion{50.0, 1.0, 0.0};  // lambda recomputed per repeat
    std::uint64_t seed = 0;
    std::string scorer0 = "msp";    // the softmax-family side of the fusion
    Temperature temperature{1.0};
    bool exclude_refs = true;       // drop drawn refs from the evaluated OoD set
    unsigned n_threads = 1;
    std::size_t ece_bins = 15;
};

/// Seeded uniform shuffle within each class, then consecutive chunks of
/// `shots`; repeat r takes chunk r of every class. Number of repeats =
/// floor(min class count / shots). Leftover indices of non-divisible classes
/// go unused.
std::vector<std::vector<std::size_t>> draw_reference_partition(
    const LabelVector& ref_pool_class_ids, std::size_t shots, std::uint64_t seed);

/// One comparison-table row: a method evaluated on every repeat plus the
/// arithmetic mean report.
struct MethodSeries {
    std::string method;
    std::vector<MetricReport> per_repeat;
    MetricReport mean;
};

struct FewShotResult {
    std::size_t n_repeats = 0;
    std::size_t unused_refs = 0;  // leftover pool indices never drawn
    std::vector<std::vector<std::size_t>> draws;          // reference indices per repeat
    std::vector<std::vector<std::size_t>> evaluated_ood;  // OoD indices scored per repeat
    // Rows in fixed order: scorer0, knn, fsknn, fsknn+s, fsknn*s, fsknns.
    std::vector<MethodSeries> methods;

    const MethodSeries& row(std::string_view method) const;
    /// The headline method (fsknns).
    const std::vector<MetricReport>& per_repeat() const { return row("fsknns").per_repeat; }
    const MetricReport& mean_report() const { return row("fsknns").mean; }
};

/// Runs the few-shot protocol: per repeat, build the reference bank from the
/// draw, score u0 and u1 = fsknn over InD test + remaining OoD samples, pick
/// lambda from the reference samples' u1 statistics, fuse, evaluate. Also
/// evaluates knn / fsknn / u0 alone and the additive and multiplicative
/// fusions for the comparison table. Deterministic given (bundle, cfg).
FewShotResult run_fewshot(const EvaluationBundle& bundle, const FewShotConfig& cfg);

std::string fewshot_to_json(const FewShotResult& r, const FewShotConfig& cfg);
/// Comparison table, optionally restricted to a subset of method rows.
std::string fewshot_table(const FewShotResult& r, bool markdown,
                          std::span<const std::string> rows = {});

}  // namespace uosr
