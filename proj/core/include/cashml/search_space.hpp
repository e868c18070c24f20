#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cashml/rng.hpp"

namespace cashml {

// One hyperparameter distribution. log_uniform bounds are the actual values
// (not exponents); sampling is uniform in log10 space.
struct Distribution {
    enum class Kind { bernoulli, categorical, uniform, uniform_int, log_uniform };
    Kind kind = Kind::uniform;
    double p = 0.0;           // bernoulli
    int n_categories = 0;     // categorical, sampled as index 0..n-1
    double lo = 0.0, hi = 0.0;        // uniform / log_uniform
    std::int64_t ilo = 0, ihi = 0;    // uniform_int, inclusive

    static Distribution bernoulli(double p);
    static Distribution categorical(int n);
    static Distribution uniform(double lo, double hi);
    static Distribution uniform_int(std::int64_t lo, std::int64_t hi);
    static Distribution log_uniform(double lo, double hi);

    double sample_real(Rng& rng) const;   // bernoulli -> 0/1, categorical/int -> value
    std::int64_t sample_int(Rng& rng) const;
    bool sample_bool(Rng& rng) const;

    bool operator==(const Distribution&) const = default;
};

enum class ImputeMethod { mean, median, mode, constant_zero, knn };
enum class SfmModel { lasso, logistic_regression, random_forest };
enum class PcaVariant { var95, n10, n50, n100 };
enum class ResampleMethod {
    random_under, random_over, near_miss, neighborhood_cleaning, smote, adasyn
};
enum class SmoteKind { regular, borderline, tomek, enn };
enum class ResampleStrategy { minority, not_minority, majority, not_majority, all };
enum class ClassifierChoice {
    svm, random_forest, logistic_regression, lda, qda, gaussian_nb, adaboost, xgboost
};
enum class SvmKernel { linear, poly, rbf };
enum class LrPenalty { l1, l2, elasticnet };

// One fully-instantiated point of the joint search space. Every field is
// populated on sampling regardless of which activators fired, so a config is
// reproducible from its seed alone.
struct WorkflowConfig {
    std::vector<bool> group_activators;

    ImputeMethod impute_method = ImputeMethod::mean;
    int knn_impute_neighbors = 5;

    bool variance_threshold_on = true;

    bool relief_on = false;
    int relief_neighbors = 3;
    double relief_sample_fraction = 0.85;
    int relief_distance_p = 2;
    int relief_n_features = 20;

    bool sfm_on = false;
    SfmModel sfm_model = SfmModel::lasso;
    double sfm_lasso_alpha = 1.0;
    int sfm_rf_trees = 50;

    bool pca_on = false;
    PcaVariant pca_variant = PcaVariant::var95;

    bool univariate_on = false;
    double univariate_p_threshold = 0.002;

    bool resample_on = false;
    ResampleMethod resample_method = ResampleMethod::random_over;
    SmoteKind smote_kind = SmoteKind::regular;
    ResampleStrategy resample_strategy = ResampleStrategy::minority;
    int resample_neighbors = 5;
    double cleaning_threshold = 0.5;

    ClassifierChoice classifier = ClassifierChoice::svm;
    SvmKernel svm_kernel = SvmKernel::rbf;
    double svm_regularization = 1.0;
    int svm_degree = 3;
    double svm_coef0 = 0.0;
    double svm_gamma = 1.0;
    int rf_trees = 50;
    int rf_min_samples_split = 2;
    int rf_max_depth = 5;
    double lr_regularization = 1.0;
    int lr_solver = 0;
    LrPenalty lr_penalty = LrPenalty::l2;
    double lr_l1_ratio = 0.5;
    int lda_solver = 0;
    double lda_shrinkage = 0.0;
    double qda_regularization = 0.0;
    double gnb_regularization = 1e-9;
    int ada_n_estimators = 50;
    double ada_learning_rate = 1.0;
    int xgb_rounds = 50;
    int xgb_max_depth = 3;
    double xgb_learning_rate = 0.1;
    double xgb_gamma = 0.0;
    int xgb_min_child_weight = 1;
    double xgb_subsample = 1.0;

    std::uint64_t rng_seed = 0;

    std::string digest() const;  // short deterministic summary for logs
};

// The joint space: one named Distribution per hyperparameter, plus the
// allowed-option lists that selector indices map into.
struct SearchSpace {
    std::size_t n_groups = 17;
    bool resampling_enabled = true;
    std::map<std::string, Distribution> dists;
    std::vector<ImputeMethod> impute_options;
    std::vector<SfmModel> sfm_options;
    std::vector<ClassifierChoice> classifier_options;

    const Distribution& at(const std::string& name) const;
};

SearchSpace default_space(bool resampling_enabled, std::size_t n_groups = 17);
// Restricted space: mandatory LASSO-based selection, logistic regression only.
SearchSpace baseline_space(std::size_t n_groups = 17);

WorkflowConfig sample(const SearchSpace& space, std::uint64_t seed);

std::string space_to_json(const SearchSpace& space);
SearchSpace space_from_json(const std::string& text);

std::string to_string(ClassifierChoice c);

}  // namespace cashml
