#include "cashml/preprocess.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cashml/classifiers.hpp"
#include "cashml/rng.hpp"
#include "cashml/trees.hpp"

namespace cashml {
namespace {

// Keeps a fixed set of columns. Shared by every selection-style step.
class ColumnSelectStep final : public FittedStep {
public:
    ColumnSelectStep(std::string kind, std::size_t in_features,
                     std::vector<std::size_t> kept, bool fallback = false)
        : kind_(std::move(kind)),
          in_features_(in_features),
          kept_(std::move(kept)),
          fallback_(fallback) {}

    Matrix apply(const Matrix& x) const override {
        if (x.cols() != in_features_)
            throw std::invalid_argument(kind_ + ": feature count mismatch");
        return x.select_cols(kept_);
    }
    std::size_t in_features() const override { return in_features_; }
    std::size_t out_features() const override { return kept_.size(); }
    std::string describe() const override {
        std::ostringstream os;
        os << kind_ << ": keep " << kept_.size() << "/" << in_features_;
        if (fallback_) os << " (empty-selection fallback)";
        return os.str();
    }
    const std::vector<std::size_t>& kept() const { return kept_; }

private:
    std::string kind_;
    std::size_t in_features_;
    std::vector<std::size_t> kept_;
    bool fallback_;
};

double percentile_linear(std::vector<double> sorted, double p) {
    const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double w = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

std::vector<double> observed_column(const Matrix& x, std::size_t j) {
    std::vector<double> v;
    for (std::size_t i = 0; i < x.rows(); ++i)
        if (!is_missing(x(i, j))) v.push_back(x(i, j));
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Step 1: group-wise selection

StepPtr fit_groupwise_select(const Matrix& x,
                             const std::vector<std::string>& group_tags,
                             const std::vector<std::string>& group_order,
                             const std::vector<bool>& activators) {
    if (group_tags.size() != x.cols())
        throw std::invalid_argument("group tags must cover all features");
    std::map<std::string, bool> active;
    for (std::size_t g = 0; g < group_order.size(); ++g)
        active[group_order[g]] = g < activators.size() ? static_cast<bool>(activators[g]) : true;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        auto it = active.find(group_tags[j]);
        if (it == active.end() || it->second) kept.push_back(j);
    }
    bool fallback = false;
    if (kept.empty()) {
        fallback = true;
        kept.resize(x.cols());
        std::iota(kept.begin(), kept.end(), std::size_t{0});
    }
    return std::make_unique<ColumnSelectStep>("groupwise_select", x.cols(),
                                              std::move(kept), fallback);
}

// ---------------------------------------------------------------------------
// Step 2: imputation

namespace {

class StatImputeStep final : public FittedStep {
public:
    StatImputeStep(ImputeMethod method, std::vector<double> fill)
        : method_(method), fill_(std::move(fill)) {}
    Matrix apply(const Matrix& x) const override {
        if (x.cols() != fill_.size())
            throw std::invalid_argument("impute: feature count mismatch");
        Matrix out = x;
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j)
                if (is_missing(out(i, j))) out(i, j) = fill_[j];
        return out;
    }
    std::size_t in_features() const override { return fill_.size(); }
    std::size_t out_features() const override { return fill_.size(); }
    std::string describe() const override {
        return "impute: method " + std::to_string(static_cast<int>(method_));
    }

private:
    ImputeMethod method_;
    std::vector<double> fill_;
};

class KnnImputeStep final : public FittedStep {
public:
    KnnImputeStep(Matrix train, std::vector<double> fallback, int k)
        : train_(std::move(train)), fallback_(std::move(fallback)), k_(k) {}

    Matrix apply(const Matrix& x) const override {
        if (x.cols() != train_.cols())
            throw std::invalid_argument("impute: feature count mismatch");
        Matrix out = x;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            bool any = false;
            for (std::size_t j = 0; j < x.cols(); ++j)
                if (is_missing(x(i, j))) any = true;
            if (!any) continue;
            // mean squared difference over features observed in both samples
            std::vector<std::pair<double, std::size_t>> dist;
            for (std::size_t t = 0; t < train_.rows(); ++t) {
                double s = 0.0;
                std::size_t shared = 0;
                for (std::size_t j = 0; j < x.cols(); ++j) {
                    if (is_missing(x(i, j)) || is_missing(train_(t, j))) continue;
                    const double d = x(i, j) - train_(t, j);
                    s += d * d;
                    ++shared;
                }
                dist.emplace_back(shared ? s / static_cast<double>(shared)
                                         : std::numeric_limits<double>::infinity(),
                                  t);
            }
            std::sort(dist.begin(), dist.end());
            for (std::size_t j = 0; j < x.cols(); ++j) {
                if (!is_missing(x(i, j))) continue;
                double sum = 0.0;
                int used = 0;
                for (const auto& [d, t] : dist) {
                    if (used >= k_) break;
                    if (is_missing(train_(t, j)) || std::isinf(d)) continue;
                    sum += train_(t, j);
                    ++used;
                }
                out(i, j) = used ? sum / used : fallback_[j];
            }
        }
        return out;
    }
    std::size_t in_features() const override { return train_.cols(); }
    std::size_t out_features() const override { return train_.cols(); }
    std::string describe() const override {
        return "impute: knn k=" + std::to_string(k_);
    }

private:
    Matrix train_;
    std::vector<double> fallback_;
    int k_;
};

}  // namespace

StepPtr fit_impute(const Matrix& x, ImputeMethod method, int knn_neighbors) {
    std::vector<double> fill(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        std::vector<double> v = observed_column(x, j);
        if (v.empty()) continue;  // zero fallback for fully-missing features
        switch (method) {
            case ImputeMethod::mean:
            case ImputeMethod::knn:
                fill[j] = std::accumulate(v.begin(), v.end(), 0.0) /
                          static_cast<double>(v.size());
                break;
            case ImputeMethod::median: {
                std::sort(v.begin(), v.end());
                const std::size_t n = v.size();
                fill[j] = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
                break;
            }
            case ImputeMethod::mode: {
                std::map<double, int> counts;
                for (double val : v) counts[val]++;
                int best = 0;
                for (const auto& [val, c] : counts)
                    if (c > best) {
                        best = c;
                        fill[j] = val;
                    }
                break;
            }
            case ImputeMethod::constant_zero:
                fill[j] = 0.0;
                break;
        }
    }
    if (method == ImputeMethod::knn)
        return std::make_unique<KnnImputeStep>(x, std::move(fill), knn_neighbors);
    return std::make_unique<StatImputeStep>(method, std::move(fill));
}

// ---------------------------------------------------------------------------
// Step 3: variance threshold

StepPtr fit_variance_threshold(const Matrix& x) {
    std::vector<double> var(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
        mean /= static_cast<double>(x.rows());
        double s = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i)
            s += (x(i, j) - mean) * (x(i, j) - mean);
        var[j] = s / static_cast<double>(x.rows());  // population variance
    }
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < x.cols(); ++j)
        if (var[j] >= 0.01) kept.push_back(j);
    bool fallback = false;
    if (kept.empty()) {
        fallback = true;
        kept.push_back(static_cast<std::size_t>(
            std::max_element(var.begin(), var.end()) - var.begin()));
    }
    return std::make_unique<ColumnSelectStep>("variance_threshold", x.cols(),
                                              std::move(kept), fallback);
}

// ---------------------------------------------------------------------------
// Step 4: robust z-scoring

namespace {

class RobustZscoreStep final : public FittedStep {
public:
    RobustZscoreStep(std::vector<double> mean, std::vector<double> std)
        : mean_(std::move(mean)), std_(std::move(std)) {}
    Matrix apply(const Matrix& x) const override {
        if (x.cols() != mean_.size())
            throw std::invalid_argument("robust_zscore: feature count mismatch");
        Matrix out(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < x.cols(); ++j)
                out(i, j) = std_[j] < 1e-12 ? 0.0 : (x(i, j) - mean_[j]) / std_[j];
        return out;
    }
    std::size_t in_features() const override { return mean_.size(); }
    std::size_t out_features() const override { return mean_.size(); }
    std::string describe() const override { return "robust_zscore"; }

private:
    std::vector<double> mean_, std_;
};

}  // namespace

StepPtr fit_robust_zscore(const Matrix& x) {
    std::vector<double> mean(x.cols(), 0.0), sd(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        std::vector<double> v;
        v.reserve(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) v.push_back(x(i, j));
        std::sort(v.begin(), v.end());
        const double p5 = percentile_linear(v, 5.0);
        const double p95 = percentile_linear(v, 95.0);
        std::vector<double> core;
        for (double val : v)
            if (val >= p5 && val <= p95) core.push_back(val);
        if (core.empty()) core = v;
        double m = std::accumulate(core.begin(), core.end(), 0.0) /
                   static_cast<double>(core.size());
        double s = 0.0;
        for (double val : core) s += (val - m) * (val - m);
        s = std::sqrt(s / static_cast<double>(core.size()));
        mean[j] = m;
        sd[j] = s;
    }
    return std::make_unique<RobustZscoreStep>(std::move(mean), std::move(sd));
}

// ---------------------------------------------------------------------------
// Step 5: ReliefF

StepPtr fit_relief(const Matrix& x, const std::vector<int>& labels,
                   int n_neighbors, double sample_fraction, int distance_p,
                   int n_keep, std::uint64_t seed) {
    const std::size_t n = x.rows(), p = x.cols();
    if (n_keep >= static_cast<int>(p)) {
        std::vector<std::size_t> all(p);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return std::make_unique<ColumnSelectStep>("relief", p, std::move(all));
    }
    Rng rng(derive_seed(seed, 0x3e11ef));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
    std::size_t m = static_cast<std::size_t>(
        std::lround(sample_fraction * static_cast<double>(n)));
    m = std::max<std::size_t>(1, std::min(m, n));

    const double pe = static_cast<double>(distance_p);
    std::vector<double> weight(p, 0.0);
    for (std::size_t s = 0; s < m; ++s) {
        const std::size_t i = order[s];
        std::vector<std::pair<double, std::size_t>> hits, misses;
        for (std::size_t t = 0; t < n; ++t) {
            if (t == i) continue;
            double d = 0.0;
            for (std::size_t j = 0; j < p; ++j)
                d += std::pow(std::fabs(x(i, j) - x(t, j)), pe);
            (labels[t] == labels[i] ? hits : misses).emplace_back(d, t);
        }
        std::sort(hits.begin(), hits.end());
        std::sort(misses.begin(), misses.end());
        const std::size_t nh = std::min<std::size_t>(n_neighbors, hits.size());
        const std::size_t nm = std::min<std::size_t>(n_neighbors, misses.size());
        for (std::size_t j = 0; j < p; ++j) {
            double hit_diff = 0.0, miss_diff = 0.0;
            for (std::size_t k = 0; k < nh; ++k)
                hit_diff += std::fabs(x(i, j) - x(hits[k].second, j));
            for (std::size_t k = 0; k < nm; ++k)
                miss_diff += std::fabs(x(i, j) - x(misses[k].second, j));
            if (nh) hit_diff /= static_cast<double>(nh);
            if (nm) miss_diff /= static_cast<double>(nm);
            weight[j] += miss_diff - hit_diff;
        }
    }
    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
    std::vector<std::size_t> kept(idx.begin(), idx.begin() + n_keep);
    std::sort(kept.begin(), kept.end());
    return std::make_unique<ColumnSelectStep>("relief", p, std::move(kept));
}

// ---------------------------------------------------------------------------
// Lasso coordinate descent (shared by SelectFromModel)

std::vector<double> lasso_fit(const Matrix& x, const std::vector<double>& y,
                              double alpha, int max_iter, double tol) {
    const std::size_t n = x.rows(), p = x.cols();
    // center so the intercept drops out
    std::vector<double> xm(p, 0.0);
    double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) xm[j] += x(i, j);
        xm[j] /= static_cast<double>(n);
    }
    std::vector<double> b(p, 0.0), resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - ym;
    std::vector<double> colsq(p, 0.0);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i)
            colsq[j] += (x(i, j) - xm[j]) * (x(i, j) - xm[j]);

    for (int it = 0; it < max_iter; ++it) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            if (colsq[j] < 1e-30) continue;
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                rho += (x(i, j) - xm[j]) * resid[i];
            rho = rho / static_cast<double>(n) + colsq[j] / static_cast<double>(n) * b[j];
            const double z = colsq[j] / static_cast<double>(n);
            double bj_new = 0.0;
            if (rho > alpha) bj_new = (rho - alpha) / z;
            else if (rho < -alpha) bj_new = (rho + alpha) / z;
            const double delta = bj_new - b[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i)
                    resid[i] -= delta * (x(i, j) - xm[j]);
                b[j] = bj_new;
                max_delta = std::max(max_delta, std::fabs(delta));
            }
        }
        if (max_delta < tol) break;
    }
    return b;
}

// ---------------------------------------------------------------------------
// Step 6: SelectFromModel

StepPtr fit_select_from_model(const Matrix& x, const std::vector<int>& labels,
                              SfmModel model, double lasso_alpha, int rf_trees,
                              std::uint64_t seed) {
    const std::size_t p = x.cols();
    std::vector<double> importance(p, 0.0);
    std::vector<std::size_t> kept;
    switch (model) {
        case SfmModel::lasso: {
            std::vector<double> y(labels.begin(), labels.end());
            const std::vector<double> coef = lasso_fit(x, y, lasso_alpha);
            for (std::size_t j = 0; j < p; ++j) {
                importance[j] = std::fabs(coef[j]);
                if (coef[j] != 0.0) kept.push_back(j);
            }
            break;
        }
        case SfmModel::logistic_regression: {
            const LogisticModel lr =
                logistic_fit(x, labels, 1.0, LrPenalty::l2, 0.0, 500);
            double mean_abs = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                importance[j] = std::fabs(lr.weights[j]);
                mean_abs += importance[j];
            }
            mean_abs /= static_cast<double>(p);
            for (std::size_t j = 0; j < p; ++j)
                if (importance[j] > mean_abs) kept.push_back(j);
            break;
        }
        case SfmModel::random_forest: {
            RandomForest rf;
            rf.fit(x, labels, rf_trees, 2, 10, derive_seed(seed, 0x5f3a));
            importance = rf.feature_importances();
            double mean_imp = std::accumulate(importance.begin(), importance.end(), 0.0) /
                              static_cast<double>(p);
            for (std::size_t j = 0; j < p; ++j)
                if (importance[j] > mean_imp) kept.push_back(j);
            break;
        }
    }
    bool fallback = false;
    if (kept.empty()) {
        fallback = true;
        kept.push_back(static_cast<std::size_t>(
            std::max_element(importance.begin(), importance.end()) -
            importance.begin()));
    }
    return std::make_unique<ColumnSelectStep>("select_from_model", p,
                                              std::move(kept), fallback);
}

// ---------------------------------------------------------------------------
// Step 7: PCA

namespace {

class PcaStep final : public FittedStep {
public:
    PcaStep(Eigen::VectorXd mean, Eigen::MatrixXd basis, std::size_t in_features)
        : mean_(std::move(mean)), basis_(std::move(basis)), in_(in_features) {}
    Matrix apply(const Matrix& x) const override {
        if (x.cols() != in_)
            throw std::invalid_argument("pca: feature count mismatch");
        Matrix out(x.rows(), static_cast<std::size_t>(basis_.cols()));
        for (std::size_t i = 0; i < x.rows(); ++i) {
            Eigen::VectorXd row(in_);
            for (std::size_t j = 0; j < in_; ++j) row(static_cast<long>(j)) = x(i, j);
            const Eigen::VectorXd proj = basis_.transpose() * (row - mean_);
            for (long j = 0; j < proj.size(); ++j)
                out(i, static_cast<std::size_t>(j)) = proj(j);
        }
        return out;
    }
    std::size_t in_features() const override { return in_; }
    std::size_t out_features() const override {
        return static_cast<std::size_t>(basis_.cols());
    }
    std::string describe() const override {
        return "pca: " + std::to_string(basis_.cols()) + " components";
    }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd basis_;
    std::size_t in_;
};

}  // namespace

StepPtr fit_pca(const Matrix& x, PcaVariant variant) {
    const long n = static_cast<long>(x.rows()), p = static_cast<long>(x.cols());
    Eigen::MatrixXd m(n, p);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < p; ++j)
            m(i, j) = x(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    const Eigen::VectorXd mean = m.colwise().mean();
    m.rowwise() -= mean.transpose();
    const Eigen::MatrixXd cov =
        m.transpose() * m / std::max<double>(1.0, static_cast<double>(n - 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    // eigenvalues ascending; walk from the top
    const Eigen::VectorXd evals = es.eigenvalues();
    const Eigen::MatrixXd evecs = es.eigenvectors();
    double total = 0.0;
    for (long j = 0; j < p; ++j) total += std::max(0.0, evals(j));
    long rank = 0;
    const double eps = 1e-12 * std::max(1.0, evals(p - 1));
    for (long j = 0; j < p; ++j)
        if (evals(j) > eps) ++rank;

    long k = 0;
    switch (variant) {
        case PcaVariant::var95: {
            double cum = 0.0;
            for (long j = p - 1; j >= 0 && (total <= 0.0 || cum / total < 0.95); --j) {
                cum += std::max(0.0, evals(j));
                ++k;
            }
            break;
        }
        case PcaVariant::n10: k = 10; break;
        case PcaVariant::n50: k = 50; break;
        case PcaVariant::n100: k = 100; break;
    }
    k = std::max<long>(1, std::min({k, rank > 0 ? rank : 1, p}));
    Eigen::MatrixXd basis(p, k);
    for (long c = 0; c < k; ++c) {
        Eigen::VectorXd v = evecs.col(p - 1 - c);
        // sign convention: largest-magnitude entry positive
        long arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        basis.col(c) = v;
    }
    return std::make_unique<PcaStep>(mean, std::move(basis), x.cols());
}

// ---------------------------------------------------------------------------
// Step 8: univariate Mann-Whitney selection

namespace {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Exact U distribution via the standard recurrence
// c(i, j, u) = c(i-1, j, u-j) + c(i, j-1, u), no ties assumed.
// Returns the two-sided p-value 2 * P(U <= min(u, n1*n2 - u)).
double exact_mw_p(std::size_t n1, std::size_t n2, double u_obs) {
    const std::size_t umax = n1 * n2;
    std::vector<std::vector<std::vector<double>>> c(
        n1 + 1, std::vector<std::vector<double>>(
                    n2 + 1, std::vector<double>(umax + 1, 0.0)));
    for (std::size_t j = 0; j <= n2; ++j) c[0][j][0] = 1.0;
    for (std::size_t i = 1; i <= n1; ++i)
        for (std::size_t j = 0; j <= n2; ++j)
            for (std::size_t u = 0; u <= umax; ++u) {
                double v = 0.0;
                if (u >= j) v += c[i - 1][j][u - j];
                if (j >= 1) v += c[i][j - 1][u];
                c[i][j][u] = v;
            }
    double total = 0.0, tail = 0.0;
    const double u_small = std::min(u_obs, static_cast<double>(umax) - u_obs);
    for (std::size_t u = 0; u <= umax; ++u) {
        total += c[n1][n2][u];
        if (static_cast<double>(u) <= u_small + 1e-9) tail += c[n1][n2][u];
    }
    return std::min(1.0, 2.0 * tail / total);
}

}  // namespace

double mann_whitney_p(const std::vector<double>& group0,
                      const std::vector<double>& group1) {
    const std::size_t n1 = group0.size(), n2 = group1.size();
    if (n1 == 0 || n2 == 0)
        throw std::invalid_argument("mann_whitney_p: both groups required");
    // midranks over the pooled sample
    std::vector<std::pair<double, int>> pooled;
    for (double v : group0) pooled.emplace_back(v, 0);
    for (double v : group1) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end());
    const std::size_t n = pooled.size();
    std::vector<double> rank(n);
    bool has_ties = false;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) ++j;
        const double mid = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) rank[k] = mid;
        if (j - i > 1) {
            has_ties = true;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
        }
        i = j;
    }
    double r1 = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (pooled[k].second == 0) r1 += rank[k];
    const double u1 = r1 - static_cast<double>(n1) * (n1 + 1) / 2.0;

    if (!has_ties && n1 < 8 && n2 < 8) return exact_mw_p(n1, n2, u1);

    const double mu = static_cast<double>(n1) * n2 / 2.0;
    const double nn = static_cast<double>(n);
    double var = static_cast<double>(n1) * n2 / 12.0 *
                 ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) return 1.0;  // all values tied
    double z = std::fabs(u1 - mu);
    z = std::max(0.0, z - 0.5);  // continuity correction
    z /= std::sqrt(var);
    return std::min(1.0, 2.0 * (1.0 - norm_cdf(z)));
}

StepPtr fit_univariate_select(const Matrix& x, const std::vector<int>& labels,
                              double p_threshold) {
    const std::size_t p = x.cols();
    std::vector<double> pvals(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> g0, g1;
        for (std::size_t i = 0; i < x.rows(); ++i)
            (labels[i] == 0 ? g0 : g1).push_back(x(i, j));
        pvals[j] = mann_whitney_p(g0, g1);
    }
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < p; ++j)
        if (pvals[j] < p_threshold) kept.push_back(j);
    bool fallback = false;
    if (kept.empty()) {
        fallback = true;
        kept.push_back(static_cast<std::size_t>(
            std::min_element(pvals.begin(), pvals.end()) - pvals.begin()));
    }
    return std::make_unique<ColumnSelectStep>("univariate_select", p,
                                              std::move(kept), fallback);
}

}  // namespace cashml
