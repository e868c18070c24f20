#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cashml/rng.hpp"
#include "cashml/stats.hpp"

using namespace cashml;

TEST_CASE("t_quantile matches standard table values") {
    // two-sided 95% table column (p = 0.975)
    CHECK(std::abs(t_quantile(1, 0.975) - 12.7062) < 1e-3);
    CHECK(std::abs(t_quantile(3, 0.975) - 3.1824) < 1e-4);
    CHECK(std::abs(t_quantile(10, 0.975) - 2.2281) < 1e-4);
    CHECK(std::abs(t_quantile(100, 0.975) - 1.9840) < 1e-4);
    // approaches the normal quantile
    CHECK(std::abs(t_quantile(1000, 0.975) - 1.962) < 1e-3);
    // symmetry
    for (int df : {1, 2, 5, 30}) {
        CHECK(std::abs(t_quantile(df, 0.5)) < 1e-8);
        CHECK(std::abs(t_quantile(df, 0.9) + t_quantile(df, 0.1)) < 1e-8);
    }
}

TEST_CASE("corrected resampled t CI worked example") {
    // values [0.6,0.7,0.8,0.7], r = n_test/n_train = 0.25:
    // mean 0.7, s^2 = 0.006667, hw = 3.1824*sqrt((0.25+0.25)*0.006667) = 0.1837
    const ConfidenceInterval ci =
        corrected_resampled_t_ci({0.6, 0.7, 0.8, 0.7}, 80, 20);
    CHECK(std::abs(ci.mean - 0.7) < 1e-12);
    CHECK(std::abs((ci.upper - ci.lower) / 2.0 - 0.1837) < 1e-3);
    CHECK(std::abs(ci.lower - 0.516) < 1e-3);
    CHECK(std::abs(ci.upper - 0.884) < 1e-3);
    CHECK(ci.method == "corrected_resampled_t");
}

TEST_CASE("corrected CI degenerate and error cases") {
    const ConfidenceInterval flat = corrected_resampled_t_ci({0.5, 0.5, 0.5}, 80, 20);
    CHECK(flat.lower == flat.upper);
    CHECK(flat.mean == 0.5);
    CHECK_THROWS(corrected_resampled_t_ci({0.5}, 80, 20));
}

TEST_CASE("corrected CI widens with the correction factor as sqrt ratio") {
    const std::vector<double> vals = {0.55, 0.65, 0.75, 0.6, 0.7};
    const double k = 5.0, r = 0.25;
    const ConfidenceInterval a = corrected_resampled_t_ci(vals, 100, 25);
    const ConfidenceInterval b = corrected_resampled_t_ci(vals, 100, 50);
    const double hw_a = (a.upper - a.lower) / 2.0;
    const double hw_b = (b.upper - b.lower) / 2.0;
    const double expected = std::sqrt((1.0 / k + 2.0 * r) / (1.0 / k + r));
    CHECK(std::abs(hw_b / hw_a - expected) < 1e-9);
    // always wider than the naive t interval
    double s2 = 0.0, mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    for (double v : vals) s2 += (v - mean) * (v - mean);
    s2 /= (vals.size() - 1);
    const double naive_hw = t_quantile(4, 0.975) * std::sqrt(s2 / k);
    CHECK(hw_a > naive_hw);
}

TEST_CASE("CIs invariant to input order") {
    std::vector<double> vals = {0.9, 0.4, 0.7, 0.55, 0.62};
    const ConfidenceInterval a = corrected_resampled_t_ci(vals, 80, 20);
    std::sort(vals.begin(), vals.end());
    const ConfidenceInterval b = corrected_resampled_t_ci(vals, 80, 20);
    CHECK(a.lower == doctest::Approx(b.lower).epsilon(1e-12));
    CHECK(a.upper == doctest::Approx(b.upper).epsilon(1e-12));
}

TEST_CASE("bootstrap normal CI") {
    // sd 0.05, point 0.80 -> [0.702, 0.898]
    std::vector<double> boot;
    // two-point distribution with exact sd 0.05
    for (int i = 0; i < 500; ++i) {
        boot.push_back(0.75);
        boot.push_back(0.85);
    }
    // sample sd of the two-point set: sqrt(n/(n-1))*0.05, so build tolerance in
    const ConfidenceInterval ci = bootstrap_normal_ci(0.80, boot);
    CHECK(std::abs(ci.mean - 0.80) < 1e-12);
    CHECK(std::abs(ci.lower - 0.702) < 1e-3);
    CHECK(std::abs(ci.upper - 0.898) < 1e-3);
    CHECK(ci.method == "bootstrap_normal");

    const ConfidenceInterval flat = bootstrap_normal_ci(0.6, {0.7, 0.7, 0.7});
    CHECK(flat.upper - flat.lower < 1e-7);
    // centered on the point estimate, not the bootstrap mean
    CHECK(flat.mean == 0.6);
    CHECK(flat.lower == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("CI clamping keeps raw bounds") {
    const ConfidenceInterval ci = bootstrap_normal_ci(0.98, {0.5, 0.9, 1.0, 0.4});
    CHECK(ci.upper > 1.0);
    CHECK(ci.upper_clamped() == 1.0);
    CHECK(ci.lower_clamped() >= 0.0);
}

namespace {

std::vector<RocPoint> shifted_curve(double delta) {
    std::vector<RocPoint> c;
    for (int i = 0; i <= 10; ++i) {
        const double fpr = i / 10.0;
        const double tpr = std::min(1.0, std::max(0.0, std::sqrt(fpr) + delta));
        c.push_back({fpr, tpr, 0.0});
    }
    c.front() = {0.0, std::max(0.0, delta), 0.0};
    return c;
}

}  // namespace

TEST_CASE("roc_band geometry") {
    const auto identical = roc_band({shifted_curve(0.0), shifted_curve(0.0)});
    CHECK(identical.half_width == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(identical.fpr_grid.size() == 101);

    // two curves offset vertically by 0.1 in their interior: half-width covers
    // the midpoint distance 0.05 (endpoints pinned at (0,*) reduce nothing
    // because the constant shift applies on the open interior too)
    std::vector<RocPoint> lo, hi;
    for (int i = 0; i <= 10; ++i) {
        const double fpr = i / 10.0;
        lo.push_back({fpr, 0.4 + 0.0 * fpr, 0.0});
        hi.push_back({fpr, 0.5 + 0.0 * fpr, 0.0});
    }
    const auto band = roc_band({lo, hi});
    CHECK(std::abs(band.half_width - 0.05) < 1e-9);
    for (double t : band.mean_tpr) CHECK(std::abs(t - 0.45) < 1e-9);
}

TEST_CASE("roc_band covers >= 95% of member curves on 100 synthetic families") {
    Rng rng(321);
    for (int family = 0; family < 100; ++family) {
        std::vector<std::vector<RocPoint>> curves;
        const int n_curves = 8 + static_cast<int>(rng.uniform_int(0, 12));
        for (int c = 0; c < n_curves; ++c)
            curves.push_back(shifted_curve(rng.uniform(-0.15, 0.15)));
        const RocBand band = roc_band(curves);
        int covered = 0;
        for (const auto& curve : curves) {
            double max_dev = 0.0;
            for (std::size_t g = 0; g < band.fpr_grid.size(); ++g) {
                const double tpr = roc_interpolate(curve, band.fpr_grid[g]);
                max_dev = std::max(max_dev, std::abs(tpr - band.mean_tpr[g]));
            }
            if (max_dev <= band.half_width + 1e-12) ++covered;
        }
        CHECK(static_cast<double>(covered) >=
              std::ceil(0.95 * static_cast<double>(n_curves)) - 1e-9);
    }
}

TEST_CASE("roc_interpolate linear between vertices") {
    std::vector<RocPoint> c = {{0.0, 0.0, 0}, {0.5, 1.0, 0}, {1.0, 1.0, 0}};
    CHECK(std::abs(roc_interpolate(c, 0.25) - 0.5) < 1e-12);
    CHECK(std::abs(roc_interpolate(c, 0.75) - 1.0) < 1e-12);
    CHECK(roc_interpolate(c, 0.0) == 0.0);
    CHECK(roc_interpolate(c, 1.0) == 1.0);
}
