#include "cashml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cashml {
namespace {

// Regularized incomplete beta I_x(a,b) via Lentz continued fraction.
double betacf(double a, double b, double x) {
    const double eps = 3e-16, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double t_cdf(double t, int df) {
    const double x = df / (df + t * t);
    const double tail = 0.5 * incbeta(df / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double sample_variance(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

double t_quantile(int df, double p) {
    if (df < 1) throw std::invalid_argument("t_quantile: df >= 1 required");
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("t_quantile: p in (0,1)");
    if (p == 0.5) return 0.0;
    double lo = -1e4, hi = 1e4;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (t_cdf(mid, df) < p ? lo : hi) = mid;
        if (hi - lo < 1e-10) break;
    }
    return 0.5 * (lo + hi);
}

ConfidenceInterval corrected_resampled_t_ci(const std::vector<double>& values,
                                            double n_train, double n_test) {
    const std::size_t k = values.size();
    if (k < 2) throw std::invalid_argument("corrected_resampled_t_ci: need k >= 2");
    if (n_train <= 0 || n_test <= 0)
        throw std::invalid_argument("corrected_resampled_t_ci: positive sizes required");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(k);
    const double s2 = sample_variance(values, mean);
    const double correction = 1.0 / static_cast<double>(k) + n_test / n_train;
    const double hw = t_quantile(static_cast<int>(k) - 1, 0.975) *
                      std::sqrt(correction * s2);
    return {mean, mean - hw, mean + hw, "corrected_resampled_t"};
}

ConfidenceInterval bootstrap_normal_ci(double point_estimate,
                                       const std::vector<double>& bootstrap_values) {
    if (bootstrap_values.size() < 2)
        throw std::invalid_argument("bootstrap_normal_ci: need >= 2 values");
    double mean = 0.0;
    for (double v : bootstrap_values) mean += v;
    mean /= static_cast<double>(bootstrap_values.size());
    const double sd = std::sqrt(sample_variance(bootstrap_values, mean));
    const double hw = 1.96 * sd;
    return {point_estimate, point_estimate - hw, point_estimate + hw,
            "bootstrap_normal"};
}

double roc_interpolate(const std::vector<RocPoint>& curve, double fpr) {
    if (curve.empty()) throw std::invalid_argument("empty roc curve");
    // curves are nondecreasing in fpr; linear interpolation between vertices,
    // extended to (1,1) past the last point
    double prev_f = 0.0, prev_t = 0.0;
    for (const auto& p : curve) {
        if (fpr <= p.fpr) {
            if (p.fpr == prev_f) return std::max(prev_t, p.tpr);
            const double w = (fpr - prev_f) / (p.fpr - prev_f);
            return prev_t + w * (p.tpr - prev_t);
        }
        prev_f = p.fpr;
        prev_t = p.tpr;
    }
    if (fpr >= 1.0 || prev_f >= 1.0) return 1.0;
    return prev_t + (fpr - prev_f) / (1.0 - prev_f) * (1.0 - prev_t);
}

RocBand roc_band(const std::vector<std::vector<RocPoint>>& curves) {
    if (curves.size() < 2) throw std::invalid_argument("roc_band: need >= 2 curves");
    RocBand band;
    const int grid_n = 101;
    band.fpr_grid.resize(grid_n);
    band.mean_tpr.assign(grid_n, 0.0);
    std::vector<std::vector<double>> interp(curves.size(),
                                            std::vector<double>(grid_n));
    for (int g = 0; g < grid_n; ++g) {
        band.fpr_grid[g] = static_cast<double>(g) / (grid_n - 1);
        for (std::size_t c = 0; c < curves.size(); ++c) {
            interp[c][g] = roc_interpolate(curves[c], band.fpr_grid[g]);
            band.mean_tpr[g] += interp[c][g];
        }
        band.mean_tpr[g] /= static_cast<double>(curves.size());
    }
    // per-curve max vertical deviation from the mean; half-width is the
    // smallest value covering >= 95% of curves entirely
    std::vector<double> dev(curves.size(), 0.0);
    for (std::size_t c = 0; c < curves.size(); ++c)
        for (int g = 0; g < grid_n; ++g)
            dev[c] = std::max(dev[c], std::fabs(interp[c][g] - band.mean_tpr[g]));
    std::sort(dev.begin(), dev.end());
    const std::size_t need = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(curves.size())));
    band.half_width = dev[std::min(need, curves.size()) - 1];
    return band;
}

}  // namespace cashml
