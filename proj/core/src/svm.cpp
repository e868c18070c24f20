#include "cashml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cashml/rng.hpp"

namespace cashml {

double svm_kernel_eval(const SvmParams& p, const double* a, const double* b,
                       std::size_t dim) {
    switch (p.kernel) {
        case SvmKernel::linear: {
            double s = 0.0;
            for (std::size_t j = 0; j < dim; ++j) s += a[j] * b[j];
            return s;
        }
        case SvmKernel::poly: {
            double s = 0.0;
            for (std::size_t j = 0; j < dim; ++j) s += a[j] * b[j];
            return std::pow(s + p.coef0, p.degree);
        }
        case SvmKernel::rbf: {
            double s = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double d = a[j] - b[j];
                s += d * d;
            }
            return std::exp(-p.gamma * s);
        }
    }
    return 0.0;
}

void smo_solve(const Matrix& x, const std::vector<double>& y,
               const SvmParams& params, std::vector<double>& alpha,
               double& bias, int max_passes, double tol) {
    const std::size_t n = x.rows();
    alpha.assign(n, 0.0);
    bias = 0.0;
    const double c = params.c;

    // full kernel matrix; training folds are small by construction
    std::vector<std::vector<double>> k(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            k[i][j] = k[j][i] =
                svm_kernel_eval(params, x.row_ptr(i), x.row_ptr(j), x.cols());

    // f[i] = sum_j alpha_j y_j K_ij, maintained incrementally. Pairwise
    // coordinate ascent on the dual along the equality-feasible direction
    // d alpha_i = y_i s, d alpha_j = -y_j s; deterministic full sweeps.
    std::vector<double> f(n, 0.0);
    const double eps_a = 1e-12 * std::max(1.0, c);
    for (int sweep = 0; sweep < std::max(max_passes, 50); ++sweep) {
        double max_step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double gi = 1.0 - y[i] * f[i];  // dW/d alpha_i
                const double gj = 1.0 - y[j] * f[j];
                const double curv = k[i][i] - 2.0 * k[i][j] + k[j][j];
                if (curv <= 1e-12) continue;
                double s = (y[i] * gi - y[j] * gj) / curv;
                // clip to the box along the direction
                double lo = y[i] > 0 ? -alpha[i] : alpha[i] - c;
                double hi = y[i] > 0 ? c - alpha[i] : alpha[i];
                lo = std::max(lo, y[j] > 0 ? alpha[j] - c : -alpha[j]);
                hi = std::min(hi, y[j] > 0 ? alpha[j] : c - alpha[j]);
                s = std::min(hi, std::max(lo, s));
                if (std::fabs(s) <= eps_a) continue;
                alpha[i] += y[i] * s;
                alpha[j] -= y[j] * s;
                for (std::size_t t = 0; t < n; ++t)
                    f[t] += s * (k[i][t] - k[j][t]);
                max_step = std::max(max_step, std::fabs(s));
            }
        }
        if (max_step < tol * 1e-3) break;
    }

    // bias from the free support vectors: y_i (f_i - b) = 1 -> b = f_i - y_i.
    // Fallbacks: any support vector, then the feasible-interval midpoint.
    double sum = 0.0;
    int cnt = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (alpha[i] > 1e-8 * c && alpha[i] < c * (1.0 - 1e-8)) {
            sum += f[i] - y[i];
            ++cnt;
        }
    if (cnt == 0) {
        // b_lo <= b <= b_hi from the bound KKT inequalities
        double b_lo = -1e300, b_hi = 1e300;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = f[i] - y[i];
            const bool at_zero = alpha[i] <= 1e-8 * c;
            if ((at_zero && y[i] > 0) || (!at_zero && y[i] < 0))
                b_hi = std::min(b_hi, v);
            if ((at_zero && y[i] < 0) || (!at_zero && y[i] > 0))
                b_lo = std::max(b_lo, v);
        }
        if (b_lo > -1e300 && b_hi < 1e300) bias = 0.5 * (b_lo + b_hi);
        else if (b_lo > -1e300) bias = b_lo;
        else if (b_hi < 1e300) bias = b_hi;
        else bias = 0.0;
    } else {
        bias = sum / cnt;
    }
}

void platt_fit(const std::vector<double>& decision, const std::vector<int>& labels,
               double& a, double& b) {
    // Platt's regularized target values, Newton with backtracking
    const std::size_t n = decision.size();
    double prior1 = 0;
    for (int y : labels) prior1 += y;
    const double prior0 = static_cast<double>(n) - prior1;
    const double hi_t = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo_t = 1.0 / (prior0 + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] == 1 ? hi_t : lo_t;

    a = 0.0;
    b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    auto objective = [&](double aa, double bb) {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = aa * decision[i] + bb;
            // -[t*log(p) + (1-t)*log(1-p)] with p = 1/(1+e^z) written stably
            obj += z > 0 ? t[i] * z + std::log1p(std::exp(-z))
                         : (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return obj;
    };
    double obj = objective(a, b);
    for (int it = 0; it < 100; ++it) {
        double g_a = 0, g_b = 0, h_aa = 1e-12, h_ab = 0, h_bb = 1e-12;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = a * decision[i] + b;
            const double p = 1.0 / (1.0 + std::exp(z));
            const double d = t[i] - (1.0 - p);  // dObj/dz
            const double w = p * (1.0 - p);
            g_a += d * decision[i];
            g_b += d;
            h_aa += w * decision[i] * decision[i];
            h_ab += w * decision[i];
            h_bb += w;
        }
        if (std::fabs(g_a) < 1e-7 && std::fabs(g_b) < 1e-7) break;
        const double det = h_aa * h_bb - h_ab * h_ab;
        double da = -(h_bb * g_a - h_ab * g_b) / det;
        double db = -(h_aa * g_b - h_ab * g_a) / det;
        double step = 1.0;
        while (step > 1e-10) {
            const double cand = objective(a + step * da, b + step * db);
            if (cand < obj + 1e-12) {
                a += step * da;
                b += step * db;
                obj = cand;
                break;
            }
            step *= 0.5;
        }
        if (step <= 1e-10) break;
    }
}

void SvmModel::fit(const Matrix& x, const std::vector<int>& labels,
                   const SvmParams& params, std::uint64_t seed) {
    params_ = params;
    support_ = x;
    const std::size_t n = x.rows();
    y_.resize(n);
    for (std::size_t i = 0; i < n; ++i) y_[i] = labels[i] == 1 ? 1.0 : -1.0;

    // out-of-fold decision values for calibration (3 folds, stratified-ish)
    std::vector<double> oof(n, 0.0);
    std::vector<int> fold(n);
    {
        Rng rng(derive_seed(seed, 0xca11b));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1],
                      order[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
        // label-sort after shuffling so round-robin assignment balances classes
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
        for (std::size_t r = 0; r < n; ++r) fold[order[r]] = static_cast<int>(r % 3);
    }
    bool calibrated = true;
    for (int f = 0; f < 3; ++f) {
        std::vector<std::size_t> tr, te;
        for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? te : tr).push_back(i);
        int pos = 0, neg = 0;
        for (std::size_t i : tr) (labels[i] == 1 ? pos : neg)++;
        if (tr.empty() || te.empty() || pos == 0 || neg == 0) {
            calibrated = false;
            break;
        }
        const Matrix xt = x.select_rows(tr);
        std::vector<double> yt;
        for (std::size_t i : tr) yt.push_back(y_[i]);
        std::vector<double> a;
        double b;
        smo_solve(xt, yt, params, a, b);
        for (std::size_t i : te) {
            double s = -b;
            for (std::size_t j = 0; j < tr.size(); ++j)
                if (a[j] > 0)
                    s += a[j] * yt[j] *
                         svm_kernel_eval(params, xt.row_ptr(j), x.row_ptr(i), x.cols());
            oof[i] = s;
        }
    }

    smo_solve(x, y_, params, alpha_, bias_);

    if (calibrated) {
        platt_fit(oof, labels, platt_a_, platt_b_);
    } else {
        platt_a_ = -1.0;
        platt_b_ = 0.0;
    }
}

std::vector<double> SvmModel::decision_values(const Matrix& x) const {
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = -bias_;
        for (std::size_t j = 0; j < support_.rows(); ++j)
            if (alpha_[j] > 0)
                s += alpha_[j] * y_[j] *
                     svm_kernel_eval(params_, support_.row_ptr(j), x.row_ptr(i),
                                     x.cols());
        out[i] = s;
    }
    return out;
}

std::vector<double> SvmModel::predict_proba(const Matrix& x) const {
    std::vector<double> d = decision_values(x);
    for (double& v : d) v = 1.0 / (1.0 + std::exp(platt_a_ * v + platt_b_));
    return d;
}

}  // namespace cashml
