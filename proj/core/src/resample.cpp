#include "cashml/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cashml/rng.hpp"

namespace cashml {
namespace {

double sq_dist(const Matrix& x, std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const double d = x(a, j) - x(b, j);
        s += d * d;
    }
    return s;
}

// indices of the k nearest rows to `i` within `pool` (excluding i itself)
std::vector<std::size_t> k_nearest(const Matrix& x, std::size_t i,
                                   const std::vector<std::size_t>& pool,
                                   std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t t : pool)
        if (t != i) d.emplace_back(sq_dist(x, i, t), t);
    std::sort(d.begin(), d.end());
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < std::min(k, d.size()); ++q) out.push_back(d[q].second);
    return out;
}

struct ClassInfo {
    int minority = 0, majority = 1;
    std::vector<std::size_t> idx[2];
};

ClassInfo classes_of(const std::vector<int>& labels) {
    ClassInfo ci;
    for (std::size_t i = 0; i < labels.size(); ++i) ci.idx[labels[i]].push_back(i);
    ci.minority = ci.idx[0].size() <= ci.idx[1].size() ? 0 : 1;
    ci.majority = 1 - ci.minority;
    return ci;
}

bool class_selected(ResampleStrategy s, bool is_minority) {
    switch (s) {
        case ResampleStrategy::minority: return is_minority;
        case ResampleStrategy::not_minority: return !is_minority;
        case ResampleStrategy::majority: return !is_minority;
        case ResampleStrategy::not_majority: return is_minority;
        case ResampleStrategy::all: return true;
    }
    return false;
}

ResampleResult keep_rows(const Matrix& x, const std::vector<int>& labels,
                         std::vector<std::size_t> keep,
                         std::vector<std::string> notes) {
    std::sort(keep.begin(), keep.end());
    ResampleResult r;
    r.values = x.select_rows(keep);
    for (std::size_t i : keep) r.labels.push_back(labels[i]);
    r.notes = std::move(notes);
    return r;
}

ResampleResult append_rows(const Matrix& x, const std::vector<int>& labels,
                           const std::vector<std::vector<double>>& extra,
                           int extra_label, std::vector<std::string> notes) {
    ResampleResult r;
    r.values = Matrix(x.rows() + extra.size(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) r.values(i, j) = x(i, j);
    for (std::size_t e = 0; e < extra.size(); ++e)
        for (std::size_t j = 0; j < x.cols(); ++j)
            r.values(x.rows() + e, j) = extra[e][j];
    r.labels = labels;
    r.labels.insert(r.labels.end(), extra.size(), extra_label);
    r.notes = std::move(notes);
    return r;
}

std::vector<std::vector<double>> smote_points(
    const Matrix& x, const std::vector<std::size_t>& seeds,
    const std::vector<std::size_t>& neighbor_pool, std::size_t k,
    std::size_t n_new, Rng& rng) {
    std::vector<std::vector<double>> out;
    if (seeds.empty() || n_new == 0) return out;
    for (std::size_t s = 0; s < n_new; ++s) {
        const std::size_t i =
            seeds[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(seeds.size()) - 1))];
        const std::vector<std::size_t> nn = k_nearest(x, i, neighbor_pool, k);
        if (nn.empty()) {
            out.push_back(std::vector<double>(x.row_ptr(i), x.row_ptr(i) + x.cols()));
            continue;
        }
        const std::size_t t = nn[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(nn.size()) - 1))];
        const double g = rng.uniform();
        std::vector<double> p(x.cols());
        for (std::size_t j = 0; j < x.cols(); ++j)
            p[j] = x(i, j) + g * (x(t, j) - x(i, j));
        out.push_back(std::move(p));
    }
    return out;
}

// majority label of the k nearest neighbors over all rows
int knn_vote(const Matrix& x, const std::vector<int>& labels, std::size_t i,
             std::size_t k) {
    std::vector<std::size_t> all(x.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const std::vector<std::size_t> nn = k_nearest(x, i, all, k);
    int pos = 0;
    for (std::size_t t : nn) pos += labels[t];
    return 2 * pos >= static_cast<int>(nn.size()) ? 1 : 0;
}

}  // namespace

ResampleResult resample(const Matrix& x, const std::vector<int>& labels,
                        const ResamplePlan& plan) {
    std::vector<std::string> notes;
    ClassInfo ci = classes_of(labels);
    const std::size_t n_min = ci.idx[ci.minority].size();
    const std::size_t n_maj = ci.idx[ci.majority].size();
    Rng rng(derive_seed(plan.seed, 0x3e5a));

    const bool synthetic = plan.method == ResampleMethod::smote ||
                           plan.method == ResampleMethod::adasyn;
    if (n_min < 2 && synthetic) {
        notes.push_back("minority class below 2 samples; resampling skipped");
        return {x, labels, notes};
    }
    std::size_t k = static_cast<std::size_t>(std::max(1, plan.n_neighbors));
    if (synthetic && k >= n_min) {
        k = n_min - 1;
        notes.push_back("n_neighbors clamped to minority size - 1");
    }

    const bool min_selected =
        class_selected(plan.strategy, /*is_minority=*/true);
    const bool maj_selected =
        class_selected(plan.strategy, /*is_minority=*/false);

    switch (plan.method) {
        case ResampleMethod::random_under: {
            std::vector<std::size_t> keep;
            for (int c = 0; c < 2; ++c) {
                auto idx = ci.idx[c];
                const bool sel = class_selected(plan.strategy, c == ci.minority);
                std::size_t target = sel ? n_min : idx.size();
                for (std::size_t i = idx.size(); i > 1; --i)
                    std::swap(idx[i - 1],
                              idx[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
                idx.resize(std::max<std::size_t>(1, target));
                keep.insert(keep.end(), idx.begin(), idx.end());
            }
            return keep_rows(x, labels, std::move(keep), std::move(notes));
        }
        case ResampleMethod::random_over: {
            std::vector<std::vector<double>> extra;
            std::vector<int> extra_labels;
            ResampleResult r{x, labels, notes};
            for (int c = 0; c < 2; ++c) {
                const bool sel = class_selected(plan.strategy, c == ci.minority);
                if (!sel || ci.idx[c].size() >= n_maj) continue;
                const std::size_t n_new = n_maj - ci.idx[c].size();
                std::vector<std::vector<double>> dup;
                for (std::size_t s = 0; s < n_new; ++s) {
                    const std::size_t i = ci.idx[c][static_cast<std::size_t>(rng.uniform_int(
                        0, static_cast<std::int64_t>(ci.idx[c].size()) - 1))];
                    dup.push_back(
                        std::vector<double>(x.row_ptr(i), x.row_ptr(i) + x.cols()));
                }
                r = append_rows(r.values, r.labels, dup, c, r.notes);
            }
            return r;
        }
        case ResampleMethod::near_miss: {
            // version 1: keep majority samples with the smallest mean distance
            // to their 3 nearest minority samples
            std::vector<std::size_t> keep = ci.idx[ci.minority];
            if (!maj_selected) {
                keep.insert(keep.end(), ci.idx[ci.majority].begin(),
                            ci.idx[ci.majority].end());
                return keep_rows(x, labels, std::move(keep), std::move(notes));
            }
            const std::size_t kk = std::min<std::size_t>(3, n_min);
            std::vector<std::pair<double, std::size_t>> scored;
            for (std::size_t i : ci.idx[ci.majority]) {
                const std::vector<std::size_t> nn =
                    k_nearest(x, i, ci.idx[ci.minority], kk);
                double mean = 0.0;
                for (std::size_t t : nn) mean += std::sqrt(sq_dist(x, i, t));
                mean /= static_cast<double>(nn.size());
                scored.emplace_back(mean, i);
            }
            std::sort(scored.begin(), scored.end());
            const std::size_t target = std::max<std::size_t>(1, n_min);
            for (std::size_t q = 0; q < std::min(target, scored.size()); ++q)
                keep.push_back(scored[q].second);
            return keep_rows(x, labels, std::move(keep), std::move(notes));
        }
        case ResampleMethod::neighborhood_cleaning: {
            const std::size_t kk = std::max<std::size_t>(1, k);
            std::vector<bool> drop(x.rows(), false);
            // ENN pass: majority samples misclassified by their kNN
            for (std::size_t i : ci.idx[ci.majority])
                if (knn_vote(x, labels, i, kk) != labels[i]) drop[i] = true;
            // cleaning pass: neighbors of misclassified minority samples,
            // applied only when the majority class is large enough
            const bool eligible =
                static_cast<double>(n_maj) >=
                plan.cleaning_threshold * static_cast<double>(n_min);
            if (eligible) {
                std::vector<std::size_t> all(x.rows());
                std::iota(all.begin(), all.end(), std::size_t{0});
                for (std::size_t i : ci.idx[ci.minority]) {
                    if (knn_vote(x, labels, i, kk) == labels[i]) continue;
                    for (std::size_t t : k_nearest(x, i, all, kk))
                        if (labels[t] == ci.majority) drop[t] = true;
                }
            }
            std::vector<std::size_t> keep;
            std::size_t kept_maj = 0;
            for (std::size_t i = 0; i < x.rows(); ++i)
                if (!drop[i]) {
                    keep.push_back(i);
                    if (labels[i] == ci.majority) ++kept_maj;
                }
            if (kept_maj == 0) {
                // never delete the whole majority class
                keep.push_back(ci.idx[ci.majority][0]);
                notes.push_back("cleaning kept one majority sample as floor");
            }
            return keep_rows(x, labels, std::move(keep), std::move(notes));
        }
        case ResampleMethod::smote: {
            ResampleResult base{x, labels, notes};
            if (plan.smote_kind == SmoteKind::borderline) {
                // danger zone: at least half of the k whole-set neighbors are
                // from the other class, but not all (those are noise)
                std::vector<std::size_t> all(x.rows());
                std::iota(all.begin(), all.end(), std::size_t{0});
                std::vector<std::size_t> danger;
                for (std::size_t i : ci.idx[ci.minority]) {
                    const std::vector<std::size_t> nn = k_nearest(x, i, all, k);
                    std::size_t other = 0;
                    for (std::size_t t : nn)
                        if (labels[t] != labels[i]) ++other;
                    if (2 * other >= nn.size() && other < nn.size())
                        danger.push_back(i);
                }
                if (danger.empty()) {
                    base.notes.push_back(
                        "no danger-zone samples; borderline fell back to regular");
                    danger = ci.idx[ci.minority];
                }
                if (min_selected && n_min < n_maj) {
                    auto pts = smote_points(x, danger, ci.idx[ci.minority], k,
                                            n_maj - n_min, rng);
                    base = append_rows(base.values, base.labels, pts, ci.minority,
                                       base.notes);
                }
                return base;
            }
            if (min_selected && n_min < n_maj) {
                auto pts = smote_points(x, ci.idx[ci.minority], ci.idx[ci.minority],
                                        k, n_maj - n_min, rng);
                base = append_rows(base.values, base.labels, pts, ci.minority,
                                   base.notes);
            }
            if (plan.smote_kind == SmoteKind::tomek) {
                // remove Tomek links: mutual nearest neighbors of opposite class
                std::vector<std::size_t> all(base.values.rows());
                std::iota(all.begin(), all.end(), std::size_t{0});
                std::vector<std::size_t> nn1(base.values.rows());
                for (std::size_t i = 0; i < base.values.rows(); ++i) {
                    const auto nn = k_nearest(base.values, i, all, 1);
                    nn1[i] = nn.empty() ? i : nn[0];
                }
                std::vector<bool> drop(base.values.rows(), false);
                for (std::size_t i = 0; i < base.values.rows(); ++i)
                    if (nn1[nn1[i]] == i && base.labels[i] != base.labels[nn1[i]])
                        drop[i] = drop[nn1[i]] = true;
                std::vector<std::size_t> keep;
                int kept[2] = {0, 0};
                for (std::size_t i = 0; i < base.values.rows(); ++i)
                    if (!drop[i]) {
                        keep.push_back(i);
                        kept[base.labels[i]]++;
                    }
                if (kept[0] == 0 || kept[1] == 0) return base;  // keep both classes
                return keep_rows(base.values, base.labels, std::move(keep),
                                 std::move(base.notes));
            }
            if (plan.smote_kind == SmoteKind::enn) {
                const std::size_t kk = 3;
                std::vector<std::size_t> keep;
                int kept[2] = {0, 0};
                for (std::size_t i = 0; i < base.values.rows(); ++i)
                    if (knn_vote(base.values, base.labels, i, kk) == base.labels[i]) {
                        keep.push_back(i);
                        kept[base.labels[i]]++;
                    }
                if (kept[0] == 0 || kept[1] == 0) return base;
                return keep_rows(base.values, base.labels, std::move(keep),
                                 std::move(base.notes));
            }
            return base;
        }
        case ResampleMethod::adasyn: {
            if (!min_selected || n_min >= n_maj) return {x, labels, notes};
            const std::size_t n_new = n_maj - n_min;
            std::vector<std::size_t> all(x.rows());
            std::iota(all.begin(), all.end(), std::size_t{0});
            // allocation proportional to local majority density
            std::vector<double> r(n_min, 0.0);
            double r_sum = 0.0;
            for (std::size_t q = 0; q < n_min; ++q) {
                const std::size_t i = ci.idx[ci.minority][q];
                const std::vector<std::size_t> nn = k_nearest(x, i, all, k);
                std::size_t other = 0;
                for (std::size_t t : nn)
                    if (labels[t] != labels[i]) ++other;
                r[q] = nn.empty() ? 0.0
                                  : static_cast<double>(other) /
                                        static_cast<double>(nn.size());
                r_sum += r[q];
            }
            std::vector<std::size_t> alloc(n_min, 0);
            if (r_sum <= 0.0) {
                for (std::size_t s = 0; s < n_new; ++s) alloc[s % n_min]++;
                notes.push_back("no majority neighbors; uniform allocation");
            } else {
                std::size_t assigned = 0;
                for (std::size_t q = 0; q < n_min; ++q) {
                    alloc[q] = static_cast<std::size_t>(
                        std::lround(r[q] / r_sum * static_cast<double>(n_new)));
                    assigned += alloc[q];
                }
                // rounding drift goes to the densest seeds
                while (assigned < n_new) {
                    const std::size_t q = static_cast<std::size_t>(
                        std::max_element(r.begin(), r.end()) - r.begin());
                    alloc[q]++;
                    ++assigned;
                }
                while (assigned > n_new) {
                    for (std::size_t q = 0; q < n_min && assigned > n_new; ++q)
                        if (alloc[q] > 0) {
                            alloc[q]--;
                            --assigned;
                        }
                }
            }
            std::vector<std::vector<double>> pts;
            for (std::size_t q = 0; q < n_min; ++q) {
                const std::size_t i = ci.idx[ci.minority][q];
                auto p = smote_points(x, {i}, ci.idx[ci.minority], k, alloc[q], rng);
                pts.insert(pts.end(), p.begin(), p.end());
            }
            return append_rows(x, labels, pts, ci.minority, notes);
        }
    }
    return {x, labels, notes};
}

}  // namespace cashml
