#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>

#include "uosr/outcomes.hpp"
#include "uosr/tensorio.hpp"
#include "uosr/types.hpp"

namespace uosr {

struct GaussianDist {
    double mu = 0.0;
    double sigma = 1.0;
};
struct BetaDist {
    double a = 1.0;
    double b = 1.0;
};
struct PointDist {
    double v = 0.0;
};
using ScoreDist = std::variant<GaussianDist, BetaDist, PointDist>;

struct GroupSpec {
    std::size_t n = 0;
    ScoreDist dist;
    std::optional<std::pair<double, double>> clip;
};

/// Seeded score samples for the InC / InW / OoD groups; outcomes labeled by
/// group. Draws are keyed by (seed, group, sample index), so generation order
/// never changes a sample's value.
std::pair<ScoreVector, OutcomeVector> gen_scores(const GroupSpec& inc, const GroupSpec& inw,
                                                 const GroupSpec& ood, std::uint64_t seed);

struct ClusterSpec {
    std::size_t n = 0;
    std::vector<double> center;
    double spread = 0.0;  // isotropic gaussian radius
    std::int64_t class_id = 0;
};

/// Synthesizes a full bundle: features sampled around cluster centers, logits
/// as negative Euclidean distances to the canonical class centers (so argmax =
/// nearest center). Train specs define the canonical centers and must carry
/// distinct class ids 0..C-1. Test specs may sit anywhere; a test cluster at a
/// wrong-class center comes out InW. OoD cluster class_ids become
/// ood_class_ids.
EvaluationBundle gen_bundle(std::span<const ClusterSpec> train,
                            std::span<const ClusterSpec> test_ind,
                            std::span<const ClusterSpec> ood, std::uint64_t seed);

struct CalibrationScenario {
    std::string id;
    std::vector<double> confidence;    // max-probability values in [0, 1]
    std::vector<std::uint8_t> correct; // 1 = correctly classified
};

/// Five fixed InC/InW confidence layouts over 100 samples each. The InC
/// distribution is shared; the InW placement varies so that the ECE ordering
/// across scenarios disagrees with the selective-prediction AUROC ordering.
std::vector<CalibrationScenario> calibration_scenarios(std::uint64_t seed);

}  // namespace uosr
