#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cashml/matrix.hpp"
#include "cashml/search_space.hpp"

namespace cashml {

// A preprocessing step after fit(): immutable, label-free at apply time.
class FittedStep {
public:
    virtual ~FittedStep() = default;
    virtual Matrix apply(const Matrix& x) const = 0;
    virtual std::size_t in_features() const = 0;
    virtual std::size_t out_features() const = 0;
    virtual std::string describe() const = 0;
};

using StepPtr = std::unique_ptr<const FittedStep>;

// Step 1. Keeps features whose group activator is true; if that would empty
// the set, keeps everything (fallback recorded in describe()).
StepPtr fit_groupwise_select(const Matrix& x,
                             const std::vector<std::string>& group_tags,
                             const std::vector<std::string>& group_order,
                             const std::vector<bool>& activators);

// Step 2. After apply no missing markers remain; statistics from training only.
StepPtr fit_impute(const Matrix& x, ImputeMethod method, int knn_neighbors);

// Step 3. Drops features with population variance < 0.01 on training data;
// keeps the single highest-variance feature if all would go.
StepPtr fit_variance_threshold(const Matrix& x);

// Step 4. Mean/std from training values inside the [5th, 95th] percentile
// interval; near-zero std maps the feature to 0.
StepPtr fit_robust_zscore(const Matrix& x);

// Step 5. ReliefF-style selection of the top n_keep features.
StepPtr fit_relief(const Matrix& x, const std::vector<int>& labels,
                   int n_neighbors, double sample_fraction, int distance_p,
                   int n_keep, std::uint64_t seed);

// Step 6. Model-importance selection; empty result keeps the single best feature.
StepPtr fit_select_from_model(const Matrix& x, const std::vector<int>& labels,
                              SfmModel model, double lasso_alpha, int rf_trees,
                              std::uint64_t seed);

// Step 7.
StepPtr fit_pca(const Matrix& x, PcaVariant variant);

// Step 8. Two-sided Mann-Whitney U per feature; keeps p < threshold, or the
// single smallest-p feature if none qualify.
StepPtr fit_univariate_select(const Matrix& x, const std::vector<int>& labels,
                              double p_threshold);

// Two-sided Mann-Whitney U p-value (exact enumeration for small tie-free
// groups, normal approximation with tie and continuity correction otherwise).
double mann_whitney_p(const std::vector<double>& group0,
                      const std::vector<double>& group1);

// Lasso coordinate descent: minimize 1/(2n)||y - b0 - Xb||^2 + alpha*||b||_1.
std::vector<double> lasso_fit(const Matrix& x, const std::vector<double>& y,
                              double alpha, int max_iter = 1000,
                              double tol = 1e-7);

}  // namespace cashml
