#include "cashml/fingerprint.hpp"

#include <algorithm>
#include <stdexcept>

namespace cashml {

bool decide_normalization(ModalityKind kind) {
    return kind == ModalityKind::qualitative;
}

BinStrategy decide_bin_strategy(ModalityKind kind) {
    return kind == ModalityKind::qualitative ? BinStrategy::fixed_count
                                             : BinStrategy::fixed_width;
}

FeatureDim decide_feature_dimensionality(const ImagingMetadata& meta) {
    if (meta.is_single_slice) return FeatureDim::d2;
    if (!meta.mean_pixel_spacing || !meta.mean_slice_thickness)
        throw std::invalid_argument(
            "multi-slice data requires pixel spacing and slice thickness");
    if (*meta.mean_pixel_spacing <= 0 || *meta.mean_slice_thickness <= 0)
        throw std::invalid_argument("spacings must be strictly positive");
    // boundary inclusive: thickness exactly 2x spacing counts as 3D
    if (*meta.mean_slice_thickness <= 2.0 * *meta.mean_pixel_spacing)
        return FeatureDim::d3;
    return FeatureDim::d2_5;
}

bool decide_resampling(std::size_t count0, std::size_t count1) {
    const double majority = static_cast<double>(std::max(count0, count1));
    const double total = static_cast<double>(count0 + count1);
    return majority / total > 0.60;  // inclusive at 60/40: disabled
}

FingerprintReport fingerprint(const std::optional<ImagingMetadata>& meta,
                              std::size_t count0, std::size_t count1) {
    FingerprintReport rep;
    if (meta) {
        rep.normalize_images = decide_normalization(meta->modality_kind);
        rep.rationale.push_back(
            meta->modality_kind == ModalityKind::qualitative
                ? "qualitative modality: image normalization on, fixed bin count"
                : "quantitative modality: no normalization, fixed bin width");
        rep.bin_strategy = decide_bin_strategy(meta->modality_kind);
        rep.feature_dimensionality = decide_feature_dimensionality(*meta);
        switch (*rep.feature_dimensionality) {
            case FeatureDim::d2:
                rep.rationale.push_back("single slice: 2D features");
                break;
            case FeatureDim::d3:
                rep.rationale.push_back(
                    "slice thickness <= 2x pixel spacing: 3D features");
                break;
            case FeatureDim::d2_5:
                rep.rationale.push_back(
                    "slice thickness > 2x pixel spacing: 2.5D features");
                break;
        }
    } else {
        rep.rationale.push_back(
            "no imaging metadata: image-level decisions not applicable");
    }
    rep.resampling_enabled = decide_resampling(count0, count1);
    rep.rationale.push_back(
        rep.resampling_enabled
            ? "class ratio worse than 60/40: resampling candidate steps enabled"
            : "class ratio at most 60/40: resampling disabled");
    return rep;
}

std::string to_string(BinStrategy s) {
    return s == BinStrategy::fixed_count ? "fixed_count" : "fixed_width";
}

std::string to_string(FeatureDim d) {
    switch (d) {
        case FeatureDim::d2: return "2D";
        case FeatureDim::d2_5: return "2.5D";
        default: return "3D";
    }
}

}  // namespace cashml
