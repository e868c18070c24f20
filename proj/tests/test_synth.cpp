#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "cashml/dataset.hpp"
#include "cashml/metrics.hpp"
#include "cashml/synth.hpp"

using namespace cashml;

namespace {

double feature_auc(const FeatureDataset& d, std::size_t j) {
    std::vector<double> col(d.n_samples());
    for (std::size_t i = 0; i < d.n_samples(); ++i) col[i] = d.values(i, j);
    return auc(d.labels, col);
}

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("generate shapes, labels and ratio") {
    SynthSpec spec;
    spec.n_samples = 200;
    spec.n_signal_features = 4;
    spec.n_noise_features = 6;
    spec.class_ratio = 0.3;
    spec.seed = 1;
    const FeatureDataset d = generate(spec);
    CHECK(d.n_samples() == 200);
    CHECK(d.n_features() == 10);
    CHECK_NOTHROW(d.validate());
    std::size_t ones = 0;
    for (int y : d.labels) ones += y == 1;
    CHECK(ones == 60);  // exact class counts, not a random draw
    // three round-robin groups
    const std::set<std::string> tags(d.group_tags.begin(), d.group_tags.end());
    CHECK(tags.size() == 3);
}

TEST_CASE("per-feature discrimination matches the normal-theory oracle") {
    // a single gaussian feature with standardized mean difference s has
    // population AUC = Phi(s / sqrt(2))
    SynthSpec spec;
    spec.n_samples = 4000;
    spec.n_signal_features = 2;
    spec.n_noise_features = 2;
    spec.class_separation = 2.0;
    spec.seed = 3;
    const FeatureDataset d = generate(spec);
    const double expected = phi(2.0 / std::sqrt(2.0));  // ~0.921
    for (std::size_t j = 0; j < 2; ++j) {
        const double a = feature_auc(d, j);
        CHECK(std::fabs(a - expected) < 0.02);
    }
    // noise features are uninformative
    for (std::size_t j = 2; j < 4; ++j)
        CHECK(std::fabs(feature_auc(d, j) - 0.5) < 0.03);
}

TEST_CASE("separation zero produces pure noise") {
    SynthSpec spec;
    spec.n_samples = 3000;
    spec.n_signal_features = 3;
    spec.n_noise_features = 3;
    spec.class_separation = 0.0;
    spec.seed = 5;
    const FeatureDataset d = generate(spec);
    for (std::size_t j = 0; j < 6; ++j)
        CHECK(std::fabs(feature_auc(d, j) - 0.5) < 0.04);
}

TEST_CASE("missing fraction is honored") {
    SynthSpec spec;
    spec.n_samples = 500;
    spec.n_signal_features = 5;
    spec.n_noise_features = 5;
    spec.missing_fraction = 0.1;
    spec.seed = 7;
    const FeatureDataset d = generate(spec);
    std::size_t missing = 0;
    for (std::size_t i = 0; i < d.n_samples(); ++i)
        for (std::size_t j = 0; j < d.n_features(); ++j)
            missing += is_missing(d.values(i, j));
    const double frac = static_cast<double>(missing) / (500.0 * 10.0);
    CHECK(frac > 0.07);
    CHECK(frac < 0.13);

    SynthSpec none = spec;
    none.missing_fraction = 0.0;
    const FeatureDataset dn = generate(none);
    for (std::size_t i = 0; i < dn.n_samples(); ++i)
        for (std::size_t j = 0; j < dn.n_features(); ++j)
            CHECK_FALSE(is_missing(dn.values(i, j)));
}

TEST_CASE("generation is deterministic per seed") {
    SynthSpec spec;
    spec.n_samples = 80;
    spec.n_signal_features = 3;
    spec.n_noise_features = 3;
    spec.missing_fraction = 0.05;
    spec.seed = 11;
    const FeatureDataset a = generate(spec);
    const FeatureDataset b = generate(spec);
    CHECK(a.values == b.values);
    CHECK(a.labels == b.labels);
    CHECK(a.sample_ids == b.sample_ids);
    spec.seed = 12;
    const FeatureDataset c = generate(spec);
    CHECK_FALSE(a.values == c.values);
}
