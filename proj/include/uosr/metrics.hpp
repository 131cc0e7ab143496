#pragma once

#include <optional>
#include <span>
#include <string>

#include "uosr/outcomes.hpp"
#include "uosr/types.hpp"

namespace uosr {

/// P(pos > neg) + 0.5 * P(pos = neg) over all cross pairs, via rank statistics
/// with midrank tie handling. neg holds scores of the accept class, pos the
/// reject class. Equals brute-force pair counting exactly.
double auroc(std::span<const double> neg, std::span<const double> pos);

/// Area under the precision-recall curve, reject class as positive.
/// Descending-score sweep with step interpolation; tied thresholds are
/// collapsed into one sweep point.
double aupr(std::span<const double> neg, std::span<const double> pos);

struct RiskCoveragePoint {
    double coverage = 0.0;
    double risk = 0.0;
    double theta = 0.0;  // the confidence threshold realized at this point
};

/// One point per sample: sort by confidence descending (ties broken by input
/// index), point i covers the top i+1 samples with risk = wrong-so-far/(i+1).
std::vector<RiskCoveragePoint> risk_coverage_curve(std::span<const double> confidence,
                                                   std::span<const std::uint8_t> correct);

/// Mean of the risk values (equal-weight integration over coverage levels),
/// times 1000 for reporting.
double aurc(std::span<const RiskCoveragePoint> curve);

/// Expected calibration error over equal-width bins partitioning (0, 1].
/// Bin b owns (b/n_bins, (b+1)/n_bins]; confidence 0 falls into the first bin.
/// Per-bin confidence means use compensated summation, so the perfectly
/// calibrated point-mass case comes out exactly 0.
double ece(std::span<const double> confidence, std::span<const std::uint8_t> correct,
           std::size_t n_bins = 15);

/// One evaluation run. AUROC/AUPR/ECE are fractions in [0,1]; aurc_uosr uses
/// the x1000 convention; accuracy is a percentage. Fields whose class split is
/// empty stay absent. Counts are doubles so that mean reports average cleanly.
struct MetricReport {
    std::optional<double> accuracy;
    std::optional<double> auroc_uosr;
    std::optional<double> auroc_osr;
    std::optional<double> auroc_sp;
    std::optional<double> auroc_inc_inw;
    std::optional<double> auroc_inc_ood;
    std::optional<double> auroc_inw_ood;
    std::optional<double> aupr_uosr;
    std::optional<double> aurc_uosr;
    std::optional<double> ece;
    double n_inc = 0.0;
    double n_inw = 0.0;
    double n_ood = 0.0;
    std::string scorer_id;
    std::vector<std::pair<std::string, double>> params;
};

struct EvaluateOptions {
    // Probability-valued confidence (max softmax probability) for ECE; only
    // InD samples participate. ECE stays absent when this is null.
    const std::vector<double>* confidence = nullptr;
    std::size_t ece_bins = 15;
};

/// Fills every MetricReport field from one score vector and its outcomes.
MetricReport evaluate(const ScoreVector& scores, const OutcomeVector& outcomes,
                      const EvaluateOptions& opt = {});

/// Arithmetic field-wise mean; an optional field is present in the mean iff it
/// is present in every input report.
MetricReport mean_report(std::span<const MetricReport> reports);

// Report serialization. The table row follows the benchmark column order:
// Acc., AURC, UOSR, OSR, InC/InW, InC/OoD, InW/OoD (percent with 2 decimals,
// AURC already x1000). Absent values render as "n/a".
std::string report_to_json(const MetricReport& r);
std::string report_table_header(bool markdown);
std::string report_table_row(const MetricReport& r, bool markdown);

}  // namespace uosr
