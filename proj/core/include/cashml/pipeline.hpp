#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cashml/classifiers.hpp"
#include "cashml/dataset.hpp"
#include "cashml/preprocess.hpp"

namespace cashml {

// A trained workflow: the fitted preprocessing chain plus the fitted
// classifier. Immutable; shareable across threads.
class FittedWorkflow {
public:
    FittedWorkflow(WorkflowConfig config, std::vector<StepPtr> steps,
                   ClassifierPtr classifier)
        : config_(std::move(config)),
          steps_(std::move(steps)),
          classifier_(std::move(classifier)) {}

    std::vector<double> predict_proba(const Matrix& x) const;
    const WorkflowConfig& config() const { return config_; }
    std::string classifier_name() const { return classifier_->name(); }
    std::string describe() const;

private:
    WorkflowConfig config_;
    std::vector<StepPtr> steps_;
    ClassifierPtr classifier_;
};

using WorkflowPtr = std::shared_ptr<const FittedWorkflow>;

// Fits the complete preprocessing chain on training rows only. group_order fixes
// the mapping from config.group_activators to group tags. Throws on
// unfittable configurations; the optimizer turns that into a failure score.
WorkflowPtr fit_workflow(const WorkflowConfig& config, const Matrix& x,
                         const std::vector<int>& labels,
                         const std::vector<std::string>& group_tags,
                         const std::vector<std::string>& group_order);

WorkflowPtr fit_workflow(const WorkflowConfig& config, const FeatureDataset& d);

}  // namespace cashml
