#pragma once

#include <vector>

namespace cashml {

struct MetricSet {
    double auc = 0.0;
    double f1_weighted = 0.0;
    double bcr = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    bool degenerate = false;  // some confusion-matrix ratio had a zero denominator
};

// Class-frequency-weighted harmonic mean of precision and recall over both
// classes; a class contributes 0 when precision + recall is 0.
double f1_weighted(const std::vector<int>& labels, const std::vector<int>& predictions);

// Probability a random positive outranks a random negative, ties counted 1/2.
double auc(const std::vector<int>& labels, const std::vector<double>& scores);

MetricSet threshold_metrics(const std::vector<int>& labels,
                            const std::vector<int>& predictions);

// Full metric set from posterior scores; hard labels at threshold 0.5.
MetricSet compute_metrics(const std::vector<int>& labels,
                          const std::vector<double>& scores);

struct RocPoint {
    double fpr, tpr, threshold;
};

// Staircase from (0,0) to (1,1), one point per distinct score plus endpoints.
std::vector<RocPoint> roc_curve(const std::vector<int>& labels,
                                const std::vector<double>& scores);

std::vector<int> hard_labels(const std::vector<double>& scores,
                             double threshold = 0.5);

}  // namespace cashml
