#pragma once

#include <string>
#include <vector>

#include "cashml/metrics.hpp"

namespace cashml {

struct ConfidenceInterval {
    double mean = 0.0;
    double lower = 0.0;  // unclamped
    double upper = 0.0;
    std::string method;

    double lower_clamped() const { return lower < 0.0 ? 0.0 : lower; }
    double upper_clamped() const { return upper > 1.0 ? 1.0 : upper; }
};

struct RocBand {
    std::vector<double> fpr_grid;    // common grid, 101 points
    std::vector<double> mean_tpr;    // vertical average
    double half_width = 0.0;         // smallest width covering >= 95% of curves
};

// Student-t quantile, accurate to 1e-4 (inverse via incomplete beta).
double t_quantile(int df, double p);

// mean +- t_{k-1,0.975} * sqrt((1/k + n_test/n_train) * s^2); the inflation
// accounts for overlapping training sets across random splits.
ConfidenceInterval corrected_resampled_t_ci(const std::vector<double>& values,
                                            double n_train, double n_test);

// point_estimate +- 1.96 * sd(bootstrap_values), centered on the point estimate.
ConfidenceInterval bootstrap_normal_ci(double point_estimate,
                                       const std::vector<double>& bootstrap_values);

// Vertical interpolation of a ROC staircase at a given fpr.
double roc_interpolate(const std::vector<RocPoint>& curve, double fpr);

RocBand roc_band(const std::vector<std::vector<RocPoint>>& curves);

}  // namespace cashml
