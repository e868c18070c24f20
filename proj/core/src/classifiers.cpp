#include "cashml/classifiers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cashml/rng.hpp"
#include "cashml/svm.hpp"
#include "cashml/trees.hpp"

namespace cashml {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_features(std::size_t expected, std::size_t got, const char* who) {
    if (expected != got)
        throw std::invalid_argument(std::string(who) + ": expected " +
                                    std::to_string(expected) + " features, got " +
                                    std::to_string(got));
}

Eigen::MatrixXd to_eigen(const Matrix& x) {
    Eigen::MatrixXd m(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            m(static_cast<long>(i), static_cast<long>(j)) = x(i, j);
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Logistic regression

double logistic_smooth_loss(const Matrix& x, const std::vector<int>& labels,
                            const std::vector<double>& weights, double intercept,
                            double l2) {
    const std::size_t n = x.rows();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double m = intercept;
        for (std::size_t j = 0; j < x.cols(); ++j) m += weights[j] * x(i, j);
        const double ym = labels[i] == 1 ? m : -m;
        loss += ym > 0 ? std::log1p(std::exp(-ym)) : -ym + std::log1p(std::exp(ym));
    }
    loss /= static_cast<double>(n);
    double w2 = 0.0;
    for (double w : weights) w2 += w * w;
    return loss + 0.5 * l2 * w2;
}

std::vector<double> logistic_smooth_grad(const Matrix& x,
                                         const std::vector<int>& labels,
                                         const std::vector<double>& weights,
                                         double intercept, double l2) {
    const std::size_t n = x.rows(), p = x.cols();
    std::vector<double> g(p + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double m = intercept;
        for (std::size_t j = 0; j < p; ++j) m += weights[j] * x(i, j);
        const double r = sigmoid(m) - labels[i];
        for (std::size_t j = 0; j < p; ++j) g[j] += r * x(i, j);
        g[p] += r;
    }
    for (double& v : g) v /= static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j) g[j] += l2 * weights[j];
    return g;
}

LogisticModel logistic_fit(const Matrix& x, const std::vector<int>& labels,
                           double regularization, LrPenalty penalty,
                           double l1_ratio, int max_iter) {
    const std::size_t p = x.cols(), n = x.rows();
    double l1 = 0.0, l2 = 0.0;
    switch (penalty) {
        case LrPenalty::l1: l1 = regularization; break;
        case LrPenalty::l2: l2 = regularization; break;
        case LrPenalty::elasticnet:
            l1 = regularization * l1_ratio;
            l2 = regularization * (1.0 - l1_ratio);
            break;
    }
    // Lipschitz bound of the smooth part: sigma_max(X)^2/(4n) + l2,
    // estimated by a few power iterations
    Eigen::MatrixXd xm = to_eigen(x);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<long>(p));
    v.normalize();
    double sigma2 = 1.0;
    for (int it = 0; it < 30; ++it) {
        Eigen::VectorXd u = xm.transpose() * (xm * v);
        sigma2 = u.norm();
        if (sigma2 <= 0) break;
        v = u / sigma2;
    }
    const double lip = sigma2 / (4.0 * static_cast<double>(n)) + l2 + 1e-12;
    const double step = 1.0 / lip;

    LogisticModel m;
    m.weights.assign(p, 0.0);
    m.intercept = 0.0;
    m.converged = false;
    for (int it = 0; it < max_iter; ++it) {
        const std::vector<double> g =
            logistic_smooth_grad(x, labels, m.weights, m.intercept, l2);
        double max_delta = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            double w = m.weights[j] - step * g[j];
            // soft threshold for the l1 part
            const double thr = step * l1;
            if (w > thr) w -= thr;
            else if (w < -thr) w += thr;
            else w = 0.0;
            max_delta = std::max(max_delta, std::fabs(w - m.weights[j]));
            m.weights[j] = w;
        }
        const double b = m.intercept - step * g[p];
        max_delta = std::max(max_delta, std::fabs(b - m.intercept));
        m.intercept = b;
        if (max_delta < 1e-9) {
            m.converged = true;
            break;
        }
    }
    return m;
}

std::vector<double> logistic_predict_proba(const LogisticModel& m, const Matrix& x) {
    check_features(m.weights.size(), x.cols(), "logistic_regression");
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double z = m.intercept;
        for (std::size_t j = 0; j < x.cols(); ++j) z += m.weights[j] * x(i, j);
        out[i] = sigmoid(z);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian discriminant models

namespace {

struct LdaModel {
    Eigen::VectorXd direction;  // S^-1 (mu1 - mu0)
    double threshold = 0.0;     // includes prior log-odds
};

LdaModel lda_fit(const Matrix& x, const std::vector<int>& labels, double shrinkage) {
    const long p = static_cast<long>(x.cols());
    const Eigen::MatrixXd xm = to_eigen(x);
    Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(p), mu1 = Eigen::VectorXd::Zero(p);
    double n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (labels[i] == 1) {
            mu1 += xm.row(static_cast<long>(i)).transpose();
            ++n1;
        } else {
            mu0 += xm.row(static_cast<long>(i)).transpose();
            ++n0;
        }
    }
    mu0 /= n0;
    mu1 /= n1;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const Eigen::VectorXd d =
            xm.row(static_cast<long>(i)).transpose() - (labels[i] == 1 ? mu1 : mu0);
        s += d * d.transpose();
    }
    s /= std::max(1.0, n0 + n1 - 2.0);
    // shrinkage is a convex-combination weight toward the diagonal
    const double a = std::clamp(shrinkage, 0.0, 1.0);
    Eigen::MatrixXd s_reg = (1.0 - a) * s + a * s.diagonal().asDiagonal().toDenseMatrix();
    s_reg += 1e-6 * (s.trace() / static_cast<double>(p) + 1e-12) *
             Eigen::MatrixXd::Identity(p, p);

    LdaModel m;
    const Eigen::VectorXd diff = mu1 - mu0;
    m.direction = s_reg.ldlt().solve(diff);
    const Eigen::VectorXd mid = 0.5 * (mu0 + mu1);
    m.threshold = m.direction.dot(mid) - std::log(n1 / n0);
    return m;
}

struct QdaClass {
    Eigen::VectorXd mean;
    Eigen::MatrixXd inv_cov;
    double log_det = 0.0;
    double log_prior = 0.0;
};

std::pair<QdaClass, QdaClass> qda_fit(const Matrix& x, const std::vector<int>& labels,
                                      double regularization) {
    const long p = static_cast<long>(x.cols());
    const Eigen::MatrixXd xm = to_eigen(x);
    const double r = std::clamp(regularization, 0.0, 1.0);
    Eigen::VectorXd mu[2] = {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p)};
    double cnt[2] = {0, 0};
    for (std::size_t i = 0; i < x.rows(); ++i) {
        mu[labels[i]] += xm.row(static_cast<long>(i)).transpose();
        cnt[labels[i]] += 1;
    }
    mu[0] /= cnt[0];
    mu[1] /= cnt[1];
    Eigen::MatrixXd s[2] = {Eigen::MatrixXd::Zero(p, p), Eigen::MatrixXd::Zero(p, p)};
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const Eigen::VectorXd d = xm.row(static_cast<long>(i)).transpose() - mu[labels[i]];
        s[labels[i]] += d * d.transpose();
    }
    const Eigen::MatrixXd pooled = (s[0] + s[1]) / std::max(1.0, cnt[0] + cnt[1] - 2.0);
    QdaClass out[2];
    for (int c = 0; c < 2; ++c) {
        Eigen::MatrixXd sc = s[c] / std::max(1.0, cnt[c] - 1.0);
        sc = (1.0 - r) * sc + r * pooled;  // blend toward the pooled covariance
        sc += 1e-6 * (sc.trace() / static_cast<double>(p) + 1e-12) *
              Eigen::MatrixXd::Identity(p, p);
        Eigen::LLT<Eigen::MatrixXd> llt(sc);
        if (llt.info() != Eigen::Success) {
            sc += 1e-3 * (sc.trace() / static_cast<double>(p) + 1e-12) *
                  Eigen::MatrixXd::Identity(p, p);
            llt.compute(sc);
        }
        const Eigen::MatrixXd l = llt.matrixL();
        out[c].log_det = 2.0 * l.diagonal().array().log().sum();
        out[c].inv_cov = llt.solve(Eigen::MatrixXd::Identity(p, p));
        out[c].mean = mu[c];
        out[c].log_prior = std::log(cnt[c] / (cnt[0] + cnt[1]));
    }
    return {out[0], out[1]};
}

// ---------------------------------------------------------------------------
// Adapters

class LogisticClassifier final : public FittedClassifier {
public:
    LogisticClassifier(LogisticModel m, std::size_t p) : m_(std::move(m)), p_(p) {}
    std::vector<double> predict_proba(const Matrix& x) const override {
        return logistic_predict_proba(m_, x);
    }
    std::string name() const override { return "logistic_regression"; }
    std::size_t n_features() const override { return p_; }
    const LogisticModel& model() const { return m_; }

private:
    LogisticModel m_;
    std::size_t p_;
};

class LdaClassifier final : public FittedClassifier {
public:
    LdaClassifier(LdaModel m, std::size_t p) : m_(std::move(m)), p_(p) {}
    std::vector<double> predict_proba(const Matrix& x) const override {
        check_features(p_, x.cols(), "lda");
        std::vector<double> out(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double z = -m_.threshold;
            for (std::size_t j = 0; j < p_; ++j)
                z += m_.direction(static_cast<long>(j)) * x(i, j);
            out[i] = sigmoid(z);
        }
        return out;
    }
    std::string name() const override { return "lda"; }
    std::size_t n_features() const override { return p_; }

private:
    LdaModel m_;
    std::size_t p_;
};

class QdaClassifier final : public FittedClassifier {
public:
    QdaClassifier(QdaClass c0, QdaClass c1, std::size_t p)
        : c0_(std::move(c0)), c1_(std::move(c1)), p_(p) {}
    std::vector<double> predict_proba(const Matrix& x) const override {
        check_features(p_, x.cols(), "qda");
        std::vector<double> out(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            Eigen::VectorXd row(static_cast<long>(p_));
            for (std::size_t j = 0; j < p_; ++j) row(static_cast<long>(j)) = x(i, j);
            auto score = [&](const QdaClass& c) {
                const Eigen::VectorXd d = row - c.mean;
                return -0.5 * c.log_det - 0.5 * d.dot(c.inv_cov * d) + c.log_prior;
            };
            out[i] = sigmoid(score(c1_) - score(c0_));
        }
        return out;
    }
    std::string name() const override { return "qda"; }
    std::size_t n_features() const override { return p_; }

private:
    QdaClass c0_, c1_;
    std::size_t p_;
};

class GnbClassifier final : public FittedClassifier {
public:
    GnbClassifier(const Matrix& x, const std::vector<int>& labels, double reg) {
        p_ = x.cols();
        mean_[0].assign(p_, 0.0);
        mean_[1].assign(p_, 0.0);
        var_[0].assign(p_, 0.0);
        var_[1].assign(p_, 0.0);
        double cnt[2] = {0, 0};
        for (std::size_t i = 0; i < x.rows(); ++i) cnt[labels[i]] += 1;
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < p_; ++j)
                mean_[labels[i]][j] += x(i, j) / cnt[labels[i]];
        double max_var = 0.0;
        for (std::size_t j = 0; j < p_; ++j) {
            for (std::size_t i = 0; i < x.rows(); ++i) {
                const int c = labels[i];
                const double d = x(i, j) - mean_[c][j];
                var_[c][j] += d * d / cnt[c];
            }
            max_var = std::max({max_var, var_[0][j], var_[1][j]});
        }
        // variance smoothing = regularization fraction of the largest variance
        const double smooth = reg * max_var + 1e-12;
        for (int c = 0; c < 2; ++c)
            for (std::size_t j = 0; j < p_; ++j) var_[c][j] += smooth;
        log_prior_[0] = std::log(cnt[0] / (cnt[0] + cnt[1]));
        log_prior_[1] = std::log(cnt[1] / (cnt[0] + cnt[1]));
    }
    std::vector<double> predict_proba(const Matrix& x) const override {
        check_features(p_, x.cols(), "gaussian_nb");
        std::vector<double> out(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double ll[2];
            for (int c = 0; c < 2; ++c) {
                ll[c] = log_prior_[c];
                for (std::size_t j = 0; j < p_; ++j) {
                    const double d = x(i, j) - mean_[c][j];
                    ll[c] += -0.5 * std::log(2.0 * M_PI * var_[c][j]) -
                             0.5 * d * d / var_[c][j];
                }
            }
            out[i] = sigmoid(ll[1] - ll[0]);
        }
        return out;
    }
    std::string name() const override { return "gaussian_nb"; }
    std::size_t n_features() const override { return p_; }

private:
    std::vector<double> mean_[2], var_[2];
    double log_prior_[2] = {0, 0};
    std::size_t p_ = 0;
};

class SvmClassifier final : public FittedClassifier {
public:
    SvmClassifier(SvmModel m, std::size_t p) : m_(std::move(m)), p_(p) {}
    std::vector<double> predict_proba(const Matrix& x) const override {
        check_features(p_, x.cols(), "svm");
        return m_.predict_proba(x);
    }
    std::string name() const override { return "svm"; }
    std::size_t n_features() const override { return p_; }

private:
    SvmModel m_;
    std::size_t p_;
};

class ForestClassifier final : public FittedClassifier {
public:
    ForestClassifier(RandomForest m, std::size_t p) : m_(std::move(m)), p_(p) {}
    std::vector<double> predict_proba(const Matrix& x) const override {
        check_features(p_, x.cols(), "random_forest");
        return m_.predict_proba(x);
    }
    std::string name() const override { return "random_forest"; }
    std::size_t n_features() const override { return p_; }

private:
    RandomForest m_;
    std::size_t p_;
};

class BoostClassifier final : public FittedClassifier {
public:
    BoostClassifier(GradientBoosting m, std::size_t p) : m_(std::move(m)), p_(p) {}
    std::vector<double> predict_proba(const Matrix& x) const override {
        check_features(p_, x.cols(), "xgboost");
        return m_.predict_proba(x);
    }
    std::string name() const override { return "xgboost"; }
    std::size_t n_features() const override { return p_; }

private:
    GradientBoosting m_;
    std::size_t p_;
};

class AdaClassifier final : public FittedClassifier {
public:
    AdaClassifier(AdaBoostStumps m, std::size_t p) : m_(std::move(m)), p_(p) {}
    std::vector<double> predict_proba(const Matrix& x) const override {
        check_features(p_, x.cols(), "adaboost");
        return m_.predict_proba(x);
    }
    std::string name() const override { return "adaboost"; }
    std::size_t n_features() const override { return p_; }

private:
    AdaBoostStumps m_;
    std::size_t p_;
};

}  // namespace

ClassifierPtr fit_classifier(const WorkflowConfig& config, const Matrix& x,
                             const std::vector<int>& labels) {
    if (x.rows() == 0 || x.rows() != labels.size())
        throw std::invalid_argument("fit_classifier: bad input sizes");
    int pos = 0, neg = 0;
    for (int y : labels) (y == 1 ? pos : neg)++;
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("fit_classifier: both classes required");

    switch (config.classifier) {
        case ClassifierChoice::svm: {
            SvmParams p;
            p.kernel = config.svm_kernel;
            p.c = config.svm_regularization;
            p.degree = config.svm_degree;
            p.coef0 = config.svm_coef0;
            p.gamma = config.svm_gamma;
            SvmModel m;
            m.fit(x, labels, p, config.rng_seed);
            return std::make_unique<SvmClassifier>(std::move(m), x.cols());
        }
        case ClassifierChoice::random_forest: {
            RandomForest m;
            m.fit(x, labels, config.rf_trees, config.rf_min_samples_split,
                  config.rf_max_depth, config.rng_seed);
            return std::make_unique<ForestClassifier>(std::move(m), x.cols());
        }
        case ClassifierChoice::logistic_regression: {
            // both solver tags share one optimizer with different budgets
            const int budget = config.lr_solver == 0 ? 500 : 2000;
            LogisticModel m = logistic_fit(x, labels, config.lr_regularization,
                                           config.lr_penalty, config.lr_l1_ratio,
                                           budget);
            return std::make_unique<LogisticClassifier>(std::move(m), x.cols());
        }
        case ClassifierChoice::lda:
            return std::make_unique<LdaClassifier>(
                lda_fit(x, labels, config.lda_shrinkage), x.cols());
        case ClassifierChoice::qda: {
            auto [c0, c1] = qda_fit(x, labels, config.qda_regularization);
            return std::make_unique<QdaClassifier>(std::move(c0), std::move(c1),
                                                   x.cols());
        }
        case ClassifierChoice::gaussian_nb:
            return std::make_unique<GnbClassifier>(x, labels,
                                                   config.gnb_regularization);
        case ClassifierChoice::adaboost: {
            AdaBoostStumps m;
            m.fit(x, labels, config.ada_n_estimators, config.ada_learning_rate,
                  config.rng_seed);
            return std::make_unique<AdaClassifier>(std::move(m), x.cols());
        }
        case ClassifierChoice::xgboost: {
            GradientBoosting m;
            m.fit(x, labels, config.xgb_rounds, config.xgb_max_depth,
                  config.xgb_learning_rate, config.xgb_gamma,
                  config.xgb_min_child_weight, config.xgb_subsample,
                  config.rng_seed);
            return std::make_unique<BoostClassifier>(std::move(m), x.cols());
        }
    }
    throw std::logic_error("unknown classifier choice");
}

}  // namespace cashml
