#include "cashml/pipeline.hpp"

#include <sstream>

#include "cashml/resample.hpp"
#include "cashml/rng.hpp"

namespace cashml {

std::vector<double> FittedWorkflow::predict_proba(const Matrix& x) const {
    Matrix cur = x;
    for (const auto& step : steps_) cur = step->apply(cur);
    return classifier_->predict_proba(cur);
}

std::string FittedWorkflow::describe() const {
    std::ostringstream os;
    for (const auto& step : steps_) os << step->describe() << "; ";
    os << classifier_->name();
    return os.str();
}

WorkflowPtr fit_workflow(const WorkflowConfig& config, const Matrix& x,
                         const std::vector<int>& labels,
                         const std::vector<std::string>& group_tags,
                         const std::vector<std::string>& group_order) {
    std::vector<StepPtr> steps;
    Matrix cur = x;
    auto push = [&](StepPtr step) {
        cur = step->apply(cur);
        steps.push_back(std::move(step));
    };

    push(fit_groupwise_select(cur, group_tags, group_order, config.group_activators));
    push(fit_impute(cur, config.impute_method, config.knn_impute_neighbors));
    if (config.variance_threshold_on) push(fit_variance_threshold(cur));
    push(fit_robust_zscore(cur));
    if (config.relief_on)
        push(fit_relief(cur, labels, config.relief_neighbors,
                        config.relief_sample_fraction, config.relief_distance_p,
                        config.relief_n_features,
                        derive_seed(config.rng_seed, 5)));
    if (config.sfm_on)
        push(fit_select_from_model(cur, labels, config.sfm_model,
                                   config.sfm_lasso_alpha, config.sfm_rf_trees,
                                   derive_seed(config.rng_seed, 6)));
    if (config.pca_on) push(fit_pca(cur, config.pca_variant));
    if (config.univariate_on)
        push(fit_univariate_select(cur, labels, config.univariate_p_threshold));

    // resampling is train-only: it shapes the classifier's fit but is not a
    // step of the prediction path
    Matrix train = cur;
    std::vector<int> train_labels = labels;
    if (config.resample_on) {
        ResamplePlan plan;
        plan.method = config.resample_method;
        plan.smote_kind = config.smote_kind;
        plan.strategy = config.resample_strategy;
        plan.n_neighbors = config.resample_neighbors;
        plan.cleaning_threshold = config.cleaning_threshold;
        plan.seed = derive_seed(config.rng_seed, 9);
        ResampleResult r = resample(train, train_labels, plan);
        train = std::move(r.values);
        train_labels = std::move(r.labels);
    }

    ClassifierPtr clf = fit_classifier(config, train, train_labels);
    return std::make_shared<const FittedWorkflow>(config, std::move(steps),
                                                  std::move(clf));
}

WorkflowPtr fit_workflow(const WorkflowConfig& config, const FeatureDataset& d) {
    return fit_workflow(config, d.values, d.labels, d.group_tags,
                        d.distinct_groups());
}

}  // namespace cashml
