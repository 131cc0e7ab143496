#pragma once

#include <filesystem>
#include <optional>

#include "uosr/types.hpp"

namespace uosr {

enum class FileFormat { binary, csv };

// Binary container layout (all integers little-endian):
//   bytes 0..3   magic "UOSR" (0x55 0x4f 0x53 0x52)
//   byte  4      version, 0x01
//   byte  5      dtype: 0x01 = real32 LE, 0x02 = int64 LE
//   byte  6      rank
//   then rank x uint64 LE dims, then the row-major payload.
// Matrices are rank 2, label vectors rank 1.

FeatureMatrix load_matrix(const std::filesystem::path& path, FileFormat format);
void write_matrix(const FeatureMatrix& m, const std::filesystem::path& path);

LabelVector load_labels(const std::filesystem::path& path, FileFormat format);
void write_labels(const LabelVector& labels, const std::filesystem::path& path);

/// All exported pieces of one evaluation run. Optional members are only
/// needed by specific scorers; their absence is reported by the scorer that
/// needs them, not by validate_bundle.
struct EvaluationBundle {
    std::optional<FeatureMatrix> train_features;  // required for KNN scorers
    std::optional<LabelVector> train_labels;
    FeatureMatrix test_features;
    std::optional<FeatureMatrix> test_logits;  // required for logit scorers
    LabelVector test_labels;
    FeatureMatrix ood_features;
    std::optional<FeatureMatrix> ood_logits;
    std::optional<LabelVector> ood_class_ids;  // required for few-shot draws
};

/// Checks row-count pairing, feature-dimension agreement and label ranges.
void validate_bundle(const EvaluationBundle& b, std::size_t n_classes);

}  // namespace uosr
