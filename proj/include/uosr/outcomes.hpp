#pragma once

#include <cstdint>
#include <vector>

#include "uosr/types.hpp"

namespace uosr {

enum class Outcome : std::uint8_t { inc = 0, inw = 1, ood = 2 };

struct OutcomeVector {
    std::vector<Outcome> outcomes;
    std::size_t n_inc = 0;
    std::size_t n_inw = 0;
    std::size_t n_ood = 0;

    std::size_t size() const { return outcomes.size(); }
    std::size_t n_ind() const { return n_inc + n_inw; }
};

// Task ground truths over outcome categories:
//   UOSR: InC accept, InW reject, OoD reject
//   OSR:  InC accept, InW accept, OoD reject
//   SP:   InC accept, InW reject, OoD excluded from evaluation
enum class Task { uosr, osr, sp };

struct TaskGroundTruth {
    Task task;
    std::vector<std::uint8_t> reject;  // 0 accept / 1 reject, aligned to all samples
    std::vector<std::uint8_t> mask;    // 1 = sample participates in the task
};

/// InD sample i is InC iff predictions[i] == labels[i], else InW; the final
/// n_ood samples of the evaluated sequence are the OoD block.
OutcomeVector classify_outcomes(const LabelVector& predictions, const LabelVector& labels,
                                std::size_t n_ood);

TaskGroundTruth ground_truth(Task task, const OutcomeVector& o);

/// n_inc / (n_inc + n_inw), as a fraction.
double closed_set_accuracy(const OutcomeVector& o);

}  // namespace uosr
