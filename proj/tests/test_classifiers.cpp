#include <doctest.h>

#include <cmath>
#include <vector>

#include "cashml/classifiers.hpp"
#include "cashml/metrics.hpp"
#include "cashml/rng.hpp"
#include "cashml/trees.hpp"

using namespace cashml;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

// two well-separated gaussian blobs in `d` dimensions (first feature carries
// the signal, the rest are noise)
void separable(std::size_t n, std::size_t d, Matrix& x, std::vector<int>& y,
               std::uint64_t seed = 3, double gap = 3.0) {
    x = Matrix(n, d);
    y.assign(n, 0);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<int>(i % 2);
        x(i, 0) = (y[i] ? gap : 0.0) + 0.6 * rng.normal();
        for (std::size_t j = 1; j < d; ++j) x(i, j) = rng.normal();
    }
}

}  // namespace

TEST_CASE("logistic gradient matches central finite differences") {
    Matrix x;
    std::vector<int> y;
    separable(24, 4, x, y, 11, 1.5);
    Rng rng(7);
    std::vector<double> w(4);
    for (double& v : w) v = rng.normal();
    const double b = 0.3;
    const double l2 = 0.25;
    const std::vector<double> grad = logistic_smooth_grad(x, y, w, b, l2);
    REQUIRE(grad.size() == 5);
    const double h = 1e-6;
    for (std::size_t k = 0; k < 5; ++k) {
        std::vector<double> wp = w, wm = w;
        double bp = b, bm = b;
        if (k < 4) {
            wp[k] += h;
            wm[k] -= h;
        } else {
            bp += h;
            bm -= h;
        }
        const double fd = (logistic_smooth_loss(x, y, wp, bp, l2) -
                           logistic_smooth_loss(x, y, wm, bm, l2)) /
                          (2.0 * h);
        const double rel = std::fabs(fd - grad[k]) /
                           std::max(1e-8, std::fabs(fd));
        CHECK(rel < 1e-5);
    }
}

TEST_CASE("logistic fit separates and l1 shrinks to zero") {
    Matrix x;
    std::vector<int> y;
    separable(60, 3, x, y, 5);
    const LogisticModel m = logistic_fit(x, y, 1.0, LrPenalty::l2, 0.0, 500);
    const std::vector<double> p = logistic_predict_proba(m, x);
    CHECK(auc(y, p) > 0.95);
    CHECK(m.weights[0] > 0.0);  // signal feature points toward class 1

    // overwhelming l1 penalty zeroes every weight
    const LogisticModel zero = logistic_fit(x, y, 1e6, LrPenalty::l1, 0.0, 500);
    for (double w : zero.weights) CHECK(w == 0.0);
    // balanced classes -> intercept-only model predicts 0.5
    const std::vector<double> pz = logistic_predict_proba(zero, x);
    CHECK(std::fabs(pz[0] - 0.5) < 1e-6);
}

TEST_CASE("elasticnet interpolates between penalties") {
    Matrix x;
    std::vector<int> y;
    separable(40, 5, x, y, 8);
    const LogisticModel l1 = logistic_fit(x, y, 0.5, LrPenalty::elasticnet, 1.0, 500);
    const LogisticModel l2 = logistic_fit(x, y, 0.5, LrPenalty::elasticnet, 0.0, 500);
    // the pure-l1 corner produces at least as many exact zeros
    std::size_t z1 = 0, z2 = 0;
    for (double w : l1.weights) z1 += w == 0.0;
    for (double w : l2.weights) z2 += w == 0.0;
    CHECK(z1 >= z2);
}

TEST_CASE("gaussian naive bayes closed form") {
    // symmetric classes at -1 / +1, equal spread: query 0 must score 0.5
    const Matrix x = from_rows({{-2}, {-1}, {0}, {2}, {1}, {0}});
    std::vector<int> y = {0, 0, 0, 1, 1, 1};
    // shift to center classes at -1 and 1
    Matrix xs = x;
    for (int i = 0; i < 3; ++i) xs(i, 0) -= 0.0;  // class 0 mean = -1 already
    WorkflowConfig cfg;
    cfg.classifier = ClassifierChoice::gaussian_nb;
    cfg.gnb_regularization = 0.0;
    const ClassifierPtr m = fit_classifier(cfg, xs, y);
    CHECK(m->name() == "gaussian_nb");
    Matrix q(1, 1);
    q(0, 0) = 0.0;
    CHECK(std::fabs(m->predict_proba(q)[0] - 0.5) < 1e-6);

    // hand-computed posterior away from the midpoint: means -1/+1, population
    // variance 2/3 each, smoothing = reg*max_var + 1e-12 with reg 0
    const double v = 2.0 / 3.0 + 1e-12;
    const double xq = 0.4;
    const double delta = (-0.5 * (xq - 1.0) * (xq - 1.0) / v) -
                         (-0.5 * (xq + 1.0) * (xq + 1.0) / v);
    const double expect = 1.0 / (1.0 + std::exp(-delta));
    Matrix q2(1, 1);
    q2(0, 0) = xq;
    CHECK(std::fabs(m->predict_proba(q2)[0] - expect) < 1e-9);
}

TEST_CASE("gnb regularization flattens the posterior") {
    Matrix x;
    std::vector<int> y;
    separable(40, 1, x, y, 21);
    WorkflowConfig sharp;
    sharp.classifier = ClassifierChoice::gaussian_nb;
    sharp.gnb_regularization = 1e-9;
    WorkflowConfig flat = sharp;
    flat.gnb_regularization = 10.0;
    Matrix q(1, 1);
    q(0, 0) = 3.0;  // deep inside class 1
    const double ps = fit_classifier(sharp, x, y)->predict_proba(q)[0];
    const double pf = fit_classifier(flat, x, y)->predict_proba(q)[0];
    CHECK(ps > pf);  // heavy smoothing pulls toward 0.5
    CHECK(pf > 0.5);
}

TEST_CASE("lda separates and shrinkage stays sane") {
    Matrix x;
    std::vector<int> y;
    separable(60, 3, x, y, 13);
    for (double s : {0.0, 0.5, 1.0}) {
        WorkflowConfig cfg;
        cfg.classifier = ClassifierChoice::lda;
        cfg.lda_shrinkage = s;
        const ClassifierPtr m = fit_classifier(cfg, x, y);
        CHECK(m->name() == "lda");
        CHECK(auc(y, m->predict_proba(x)) > 0.95);
    }
}

TEST_CASE("qda captures covariance differences lda cannot") {
    // both classes centered at 0; class 1 has much larger spread, so only a
    // quadratic boundary separates large-|x| points
    Matrix x(80, 1);
    std::vector<int> y(80);
    Rng rng(17);
    for (int i = 0; i < 80; ++i) {
        y[i] = i % 2;
        x(i, 0) = (y[i] ? 4.0 : 0.3) * rng.normal();
    }
    WorkflowConfig cfg;
    cfg.classifier = ClassifierChoice::qda;
    cfg.qda_regularization = 0.0;
    const ClassifierPtr m = fit_classifier(cfg, x, y);
    Matrix far(1, 1), near(1, 1);
    far(0, 0) = 6.0;
    near(0, 0) = 0.05;
    CHECK(m->predict_proba(far)[0] > 0.9);
    CHECK(m->predict_proba(near)[0] < 0.5);
}

TEST_CASE("random forest learns, reports importances, is seed-deterministic") {
    Matrix x;
    std::vector<int> y;
    separable(80, 5, x, y, 29);
    RandomForest f;
    f.fit(x, y, 50, 2, 8, 123);
    CHECK(auc(y, f.predict_proba(x)) > 0.95);
    const std::vector<double> imp = f.feature_importances();
    REQUIRE(imp.size() == 5);
    double total = 0.0;
    for (double v : imp) {
        CHECK(v >= 0.0);
        total += v;
    }
    CHECK(std::fabs(total - 1.0) < 1e-9);
    // signal feature dominates
    for (std::size_t j = 1; j < 5; ++j) CHECK(imp[0] > imp[j]);

    RandomForest g;
    g.fit(x, y, 50, 2, 8, 123);
    CHECK(f.predict_proba(x) == g.predict_proba(x));
    RandomForest h;
    h.fit(x, y, 50, 2, 8, 124);
    CHECK_FALSE(f.predict_proba(x) == h.predict_proba(x));
}

TEST_CASE("gradient boosting training loss is monotone nonincreasing") {
    Matrix x;
    std::vector<int> y;
    separable(60, 4, x, y, 31);
    GradientBoosting b;
    b.fit(x, y, 40, 3, 0.2, 0.0, 1.0, 1.0, 9);
    const std::vector<double>& trace = b.training_loss();
    REQUIRE(trace.size() == 41);  // base + one per round
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] <= trace[i - 1] + 1e-12);
    CHECK(auc(y, b.predict_proba(x)) > 0.95);
}

TEST_CASE("gradient boosting with subsampling still reduces loss overall") {
    Matrix x;
    std::vector<int> y;
    separable(60, 4, x, y, 37);
    GradientBoosting b;
    b.fit(x, y, 60, 3, 0.1, 0.1, 1.0, 0.8, 9);
    const std::vector<double>& trace = b.training_loss();
    CHECK(trace.back() < trace.front());
    CHECK(auc(y, b.predict_proba(x)) > 0.9);
}

TEST_CASE("adaboost stumps separate a 1-d problem") {
    Matrix x;
    std::vector<int> y;
    separable(60, 1, x, y, 41);
    AdaBoostStumps a;
    a.fit(x, y, 50, 1.0, 5);
    const std::vector<double> p = a.predict_proba(x);
    CHECK(auc(y, p) > 0.95);
    for (double v : p) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("fit_classifier dispatches every choice") {
    Matrix x;
    std::vector<int> y;
    separable(60, 3, x, y, 43);
    const std::vector<std::pair<ClassifierChoice, std::string>> cases = {
        {ClassifierChoice::svm, "svm"},
        {ClassifierChoice::random_forest, "random_forest"},
        {ClassifierChoice::logistic_regression, "logistic_regression"},
        {ClassifierChoice::lda, "lda"},
        {ClassifierChoice::qda, "qda"},
        {ClassifierChoice::gaussian_nb, "gaussian_nb"},
        {ClassifierChoice::adaboost, "adaboost"},
        {ClassifierChoice::xgboost, "xgboost"},
    };
    for (const auto& [choice, name] : cases) {
        WorkflowConfig cfg;
        cfg.classifier = choice;
        cfg.svm_kernel = SvmKernel::linear;
        cfg.rng_seed = 77;
        const ClassifierPtr m = fit_classifier(cfg, x, y);
        INFO("classifier " << name);
        CHECK(m->name() == name);
        CHECK(m->n_features() == 3);
        const std::vector<double> p = m->predict_proba(x);
        REQUIRE(p.size() == 60);
        for (double v : p) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(auc(y, p) > 0.85);
        // feature-count mismatch is rejected
        Matrix bad(2, 4);
        CHECK_THROWS(m->predict_proba(bad));
    }
}
