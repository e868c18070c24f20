#include "cashml/synth.hpp"

#include <stdexcept>

#include "cashml/rng.hpp"

namespace cashml {

FeatureDataset generate(const SynthSpec& spec) {
    if (spec.n_samples < 4 || spec.n_signal_features + spec.n_noise_features == 0)
        throw std::invalid_argument("synth: need >=4 samples and >=1 feature");
    if (spec.class_ratio <= 0.0 || spec.class_ratio >= 1.0 ||
        spec.missing_fraction < 0.0 || spec.missing_fraction > 1.0)
        throw std::invalid_argument("synth: fractions out of range");

    const std::size_t p = spec.n_signal_features + spec.n_noise_features;
    Rng rng(derive_seed(spec.seed, 0x570c4));
    FeatureDataset d;
    d.class0_name = "0";
    d.class1_name = "1";
    d.values = Matrix(spec.n_samples, p);
    std::size_t n1 = static_cast<std::size_t>(
        std::lround(spec.class_ratio * static_cast<double>(spec.n_samples)));
    n1 = std::max<std::size_t>(2, std::min(n1, spec.n_samples - 2));

    static const char* kGroups[3] = {"synthetic_a", "synthetic_b", "synthetic_c"};
    for (std::size_t j = 0; j < p; ++j) {
        d.feature_names.push_back("feature_" + std::to_string(j));
        d.group_tags.push_back(kGroups[j % 3]);
    }
    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        d.sample_ids.push_back("sample_" + std::to_string(i));
        const int y = i < n1 ? 1 : 0;
        d.labels.push_back(y);
        for (std::size_t j = 0; j < p; ++j) {
            double v = rng.normal();
            if (j < spec.n_signal_features && y == 1) v += spec.class_separation;
            d.values(i, j) = v;
        }
    }
    if (spec.missing_fraction > 0.0)
        for (std::size_t i = 0; i < spec.n_samples; ++i)
            for (std::size_t j = 0; j < p; ++j)
                if (rng.uniform() < spec.missing_fraction)
                    d.values(i, j) = missing_marker();

    d.validate();
    return d;
}

}  // namespace cashml
