#pragma once

#include <cstdint>
#include <vector>

#include "cashml/matrix.hpp"
#include "cashml/search_space.hpp"

namespace cashml {

struct SvmParams {
    SvmKernel kernel = SvmKernel::rbf;
    double c = 1.0;
    int degree = 3;
    double coef0 = 0.0;  // polynomial homogeneity constant
    double gamma = 1.0;  // rbf
};

double svm_kernel_eval(const SvmParams& p, const double* a, const double* b,
                       std::size_t dim);

// Binary SVM trained by SMO on the dual problem. Posterior probabilities via
// a Platt sigmoid fitted on out-of-fold decision values from an internal
// 3-fold split of the training data.
class SvmModel {
public:
    void fit(const Matrix& x, const std::vector<int>& labels,
             const SvmParams& params, std::uint64_t seed);
    std::vector<double> decision_values(const Matrix& x) const;
    std::vector<double> predict_proba(const Matrix& x) const;

    // dual variables in training-row order, for KKT checks
    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return bias_; }

private:
    SvmParams params_;
    Matrix support_;              // full training matrix (alpha may be 0)
    std::vector<double> y_;       // +-1
    std::vector<double> alpha_;
    double bias_ = 0.0;
    double platt_a_ = -1.0, platt_b_ = 0.0;
};

// Solve the dual on (x, y in +-1) returning alphas and bias. Exposed for the
// oracle comparison in tests.
void smo_solve(const Matrix& x, const std::vector<double>& y,
               const SvmParams& params, std::vector<double>& alpha,
               double& bias, int max_passes = 200, double tol = 1e-4);

// Platt scaling: fit sigmoid p = 1/(1+exp(a*f+b)) on (decision value, label).
void platt_fit(const std::vector<double>& decision, const std::vector<int>& labels,
               double& a, double& b);

}  // namespace cashml
