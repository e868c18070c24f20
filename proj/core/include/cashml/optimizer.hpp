#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "cashml/dataset.hpp"
#include "cashml/pipeline.hpp"
#include "cashml/search_space.hpp"

namespace cashml {

enum class EnsembleMethod { top_n, fit_number, forward_selection };

struct OptimizerConfig {
    int n_random_search = 1000;
    EnsembleMethod ensemble_method = EnsembleMethod::top_n;
    int n_ensemble = 100;
    int k_training = 5;
    double validation_fraction = 0.2;
    std::uint64_t master_seed = 0;
    std::uint64_t outer_split_index = 0;  // feeds per-config seed derivation
    int n_workers = 1;
    // forward-selection settings
    int fs_n_bags = 20;
    double fs_bag_fraction = 0.5;
    int fs_max_rounds = 100;
    std::ostream* log = nullptr;  // one line per evaluated workflow
};

struct EvaluatedWorkflow {
    WorkflowConfig config;
    std::size_t sample_index = 0;
    std::vector<double> fold_scores;                   // validation F1_w per fold
    double mean_score = -1.0;                          // -1 marks failure
    std::vector<std::vector<double>> fold_posteriors;  // retained for ensembling
    bool failed = false;
    std::string failure_note;
};

// Averaging ensemble of retrained workflows. Weights are uniform except for
// forward selection, where they are normalized selection counts.
class Ensemble {
public:
    Ensemble(std::vector<WorkflowPtr> members, std::vector<double> weights,
             EnsembleMethod method)
        : members_(std::move(members)), weights_(std::move(weights)),
          method_(method) {}

    std::vector<double> predict_proba(const Matrix& x) const;
    std::size_t size() const { return members_.size(); }
    const std::vector<WorkflowPtr>& members() const { return members_; }
    const std::vector<double>& weights() const { return weights_; }
    EnsembleMethod method() const { return method_; }

private:
    std::vector<WorkflowPtr> members_;
    std::vector<double> weights_;
    EnsembleMethod method_;
};

// The k_training stratified 80/20 validation splits shared by all workflows
// of one optimization run.
std::vector<SplitPlan> make_validation_splits(const FeatureDataset& training_set,
                                              int k_training,
                                              double validation_fraction,
                                              std::uint64_t master_seed);

// Fits the full pipeline on each split's 80% and scores validation F1_w on
// its 20%. A failing fold marks the whole workflow failed (score -1).
EvaluatedWorkflow evaluate_workflow(const WorkflowConfig& config,
                                    const FeatureDataset& training_set,
                                    const std::vector<SplitPlan>& splits,
                                    std::size_t sample_index);

// Indices ordered by descending mean validation F1_w; ties and failures keep
// sampling order, failures last.
std::vector<std::size_t> rank_workflows(const std::vector<EvaluatedWorkflow>& evaluated);

Ensemble build_topn(const std::vector<EvaluatedWorkflow>& evaluated,
                    const std::vector<std::size_t>& ranked, int n_ensemble,
                    const FeatureDataset& training_set);

Ensemble build_fitnumber(const std::vector<EvaluatedWorkflow>& evaluated,
                         const std::vector<std::size_t>& ranked,
                         const std::vector<SplitPlan>& splits,
                         const FeatureDataset& training_set);

Ensemble build_forward_selection(const std::vector<EvaluatedWorkflow>& evaluated,
                                 const std::vector<std::size_t>& ranked,
                                 const std::vector<SplitPlan>& splits,
                                 const FeatureDataset& training_set, int n_bags,
                                 double bag_fraction, int max_rounds,
                                 std::uint64_t seed);

Ensemble optimize(const FeatureDataset& training_set, const SearchSpace& space,
                  const OptimizerConfig& cfg);

}  // namespace cashml
