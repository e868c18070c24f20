#pragma once

#include <cstdint>
#include <vector>

#include "cashml/matrix.hpp"

namespace cashml {

struct TreeNode {
    int feature = -1;        // -1 for leaves
    double threshold = 0.0;  // go left when value <= threshold
    int left = -1, right = -1;
    double value = 0.0;      // class-1 fraction (classification) or leaf weight
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(const double* row) const;
};

// CART forest on bootstrap samples with sqrt(p) feature subsampling.
// Per-tree seeds are derived from the forest seed, so results do not depend
// on evaluation order or thread count.
class RandomForest {
public:
    void fit(const Matrix& x, const std::vector<int>& labels, int n_trees,
             int min_samples_split, int max_depth, std::uint64_t seed);
    std::vector<double> predict_proba(const Matrix& x) const;
    // normalized mean impurity decrease
    std::vector<double> feature_importances() const;

private:
    std::vector<Tree> trees_;
    std::vector<double> importances_;
    std::size_t n_features_ = 0;
};

// Second-order gradient boosting on logistic loss: gamma is the minimum
// split gain, min_child_weight the minimum hessian sum per child, subsample
// the per-round row fraction.
class GradientBoosting {
public:
    void fit(const Matrix& x, const std::vector<int>& labels, int n_rounds,
             int max_depth, double learning_rate, double gamma,
             double min_child_weight, double subsample, std::uint64_t seed);
    std::vector<double> predict_proba(const Matrix& x) const;
    // mean logistic loss on the training set after each round (round 0 = base)
    const std::vector<double>& training_loss() const { return loss_trace_; }

private:
    std::vector<Tree> trees_;
    double base_score_ = 0.0;  // log-odds
    double learning_rate_ = 0.1;
    std::vector<double> loss_trace_;
    std::size_t n_features_ = 0;
};

// Depth-1 stumps with SAMME.R-style aggregation; probability via the
// logistic transform of the aggregated class log-odds.
class AdaBoostStumps {
public:
    void fit(const Matrix& x, const std::vector<int>& labels, int n_estimators,
             double learning_rate, std::uint64_t seed);
    std::vector<double> predict_proba(const Matrix& x) const;

private:
    struct Stump {
        int feature = 0;
        double threshold = 0.0;
        double left_score = 0.0, right_score = 0.0;  // half log-odds ratios
    };
    std::vector<Stump> stumps_;
    double learning_rate_ = 1.0;
    std::size_t n_features_ = 0;
};

}  // namespace cashml
