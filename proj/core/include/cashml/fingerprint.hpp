#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cashml {

enum class ModalityKind { qualitative, quantitative };
enum class BinStrategy { fixed_count, fixed_width };
enum class FeatureDim { d2, d2_5, d3 };

struct ImagingMetadata {
    ModalityKind modality_kind = ModalityKind::quantitative;
    std::optional<double> mean_pixel_spacing;   // mm
    std::optional<double> mean_slice_thickness; // mm
    bool is_single_slice = false;
};

// Metadata-level decision rules that shape the search space before any
// optimization runs. Every firing is recorded in the rationale.
struct FingerprintReport {
    std::optional<bool> normalize_images;        // unset when no imaging metadata
    std::optional<BinStrategy> bin_strategy;
    std::optional<FeatureDim> feature_dimensionality;
    bool resampling_enabled = true;
    std::vector<std::string> rationale;
};

bool decide_normalization(ModalityKind kind);
BinStrategy decide_bin_strategy(ModalityKind kind);
FeatureDim decide_feature_dimensionality(const ImagingMetadata& meta);
// false (resampling disabled) iff majority fraction <= 0.60, inclusive.
bool decide_resampling(std::size_t count0, std::size_t count1);

// Runs all applicable rules. Image-level decisions stay unset when no
// metadata is supplied (pure feature-matrix mode).
FingerprintReport fingerprint(const std::optional<ImagingMetadata>& meta,
                              std::size_t count0, std::size_t count1);

std::string to_string(BinStrategy s);
std::string to_string(FeatureDim d);

}  // namespace cashml
