#pragma once

#include <cstdint>

#include "cashml/dataset.hpp"

namespace cashml {

struct SynthSpec {
    std::size_t n_samples = 100;
    std::size_t n_signal_features = 5;
    std::size_t n_noise_features = 45;
    double class_separation = 2.0;  // standardized mean difference
    double class_ratio = 0.5;       // fraction of class 1
    double missing_fraction = 0.0;
    std::uint64_t seed = 0;
};

// Class-conditional normal signal features plus label-independent noise.
// Group tags round-robin over three synthetic groups.
FeatureDataset generate(const SynthSpec& spec);

}  // namespace cashml
