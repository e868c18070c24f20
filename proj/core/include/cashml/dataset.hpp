#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cashml/matrix.hpp"

namespace cashml {

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tabular dataset: samples x features with binary labels and per-feature
// group tags. Immutable after load; shared read-only across workers.
struct FeatureDataset {
    std::vector<std::string> sample_ids;
    std::vector<std::string> feature_names;
    std::vector<std::string> group_tags;  // one per feature
    Matrix values;                        // NaN = missing
    std::vector<int> labels;              // 0/1
    std::string class0_name, class1_name;

    std::size_t n_samples() const { return values.rows(); }
    std::size_t n_features() const { return values.cols(); }

    // Throws LoadError on any invariant violation.
    void validate() const;

    FeatureDataset subset(const std::vector<std::size_t>& row_idx) const;

    std::vector<std::string> distinct_groups() const;
};

struct SplitPlan {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
};

struct CsvOptions {
    std::string label_column = "label";
    std::optional<std::string> groups_path;
    // Value of the label column mapped to class 1. Unset: lexicographically
    // larger of the two distinct values becomes class 1.
    std::optional<std::string> positive_class;
    std::string default_group = "default";
};

FeatureDataset load_csv(const std::string& path, const CsvOptions& opts);
void write_csv(const FeatureDataset& d, const std::string& path,
               const std::string& label_column = "label");
void write_groups_csv(const FeatureDataset& d, const std::string& path);

// Stratified train/test split: per-class test counts are
// round-half-up(class_count * test_fraction), repaired so both partitions
// keep at least one sample of each class. Deterministic per seed.
SplitPlan stratified_split(const FeatureDataset& d, double test_fraction,
                           std::uint64_t seed);

}  // namespace cashml
