#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cashml/matrix.hpp"
#include "cashml/search_space.hpp"

namespace cashml {

class FittedClassifier {
public:
    virtual ~FittedClassifier() = default;
    // posterior probability of class 1, one value per row
    virtual std::vector<double> predict_proba(const Matrix& x) const = 0;
    virtual std::string name() const = 0;
    virtual std::size_t n_features() const = 0;
};

using ClassifierPtr = std::unique_ptr<const FittedClassifier>;

// Trains the classifier chosen by config.classifier with its settings.
ClassifierPtr fit_classifier(const WorkflowConfig& config, const Matrix& x,
                             const std::vector<int>& labels);

// --- logistic regression internals, exposed for gradient checks -----------

struct LogisticModel {
    std::vector<double> weights;
    double intercept = 0.0;
    bool converged = true;
};

// Mean logistic loss plus l2 penalty (the smooth part of the objective).
double logistic_smooth_loss(const Matrix& x, const std::vector<int>& labels,
                            const std::vector<double>& weights, double intercept,
                            double l2);
// Gradient of the smooth part w.r.t. (weights, intercept); last entry is the
// intercept derivative.
std::vector<double> logistic_smooth_grad(const Matrix& x,
                                         const std::vector<int>& labels,
                                         const std::vector<double>& weights,
                                         double intercept, double l2);

// Proximal-gradient solver for l1/l2/elasticnet. regularization is the
// penalty strength lambda; l1_ratio only matters for elasticnet.
LogisticModel logistic_fit(const Matrix& x, const std::vector<int>& labels,
                           double regularization, LrPenalty penalty,
                           double l1_ratio, int max_iter);

std::vector<double> logistic_predict_proba(const LogisticModel& m, const Matrix& x);

}  // namespace cashml
