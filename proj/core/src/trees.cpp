#include "cashml/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cashml/rng.hpp"

namespace cashml {

double Tree::predict(const double* row) const {
    int n = 0;
    while (nodes[n].feature >= 0)
        n = row[nodes[n].feature] <= nodes[n].threshold ? nodes[n].left
                                                        : nodes[n].right;
    return nodes[n].value;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct CartBuilder {
    const Matrix& x;
    const std::vector<int>& labels;
    int min_samples_split;
    int max_depth;
    std::size_t max_features;
    Rng& rng;
    Tree tree;
    std::vector<double>& importances;

    int build(std::vector<std::size_t>& idx, int depth) {
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        double pos = 0;
        for (std::size_t i : idx) pos += labels[i];
        const double n = static_cast<double>(idx.size());
        tree.nodes[node_id].value = pos / n;
        const double gini = 2.0 * (pos / n) * (1.0 - pos / n);
        if (depth >= max_depth || idx.size() < static_cast<std::size_t>(min_samples_split) ||
            pos == 0 || pos == n)
            return node_id;

        // random feature subset, sampled without replacement
        std::vector<std::size_t> feats(x.cols());
        std::iota(feats.begin(), feats.end(), std::size_t{0});
        for (std::size_t i = feats.size(); i > 1; --i)
            std::swap(feats[i - 1], feats[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
        feats.resize(std::min(max_features, feats.size()));
        std::sort(feats.begin(), feats.end());  // order-independent of shuffle path

        int best_f = -1;
        double best_thr = 0, best_score = gini, best_decrease = 0;
        std::vector<std::pair<double, int>> vals(idx.size());
        for (std::size_t f : feats) {
            for (std::size_t i = 0; i < idx.size(); ++i)
                vals[i] = {x(idx[i], f), labels[idx[i]]};
            std::sort(vals.begin(), vals.end());
            double lpos = 0, lcnt = 0;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                lpos += vals[i].second;
                lcnt += 1;
                if (vals[i].first == vals[i + 1].first) continue;
                const double rcnt = n - lcnt, rpos = pos - lpos;
                const double gl = 2.0 * (lpos / lcnt) * (1.0 - lpos / lcnt);
                const double gr = 2.0 * (rpos / rcnt) * (1.0 - rpos / rcnt);
                const double score = (lcnt * gl + rcnt * gr) / n;
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_f = static_cast<int>(f);
                    best_thr = 0.5 * (vals[i].first + vals[i + 1].first);
                    best_decrease = gini - score;
                }
            }
        }
        if (best_f < 0) return node_id;

        std::vector<std::size_t> left, right;
        for (std::size_t i : idx)
            (x(i, static_cast<std::size_t>(best_f)) <= best_thr ? left : right)
                .push_back(i);
        if (left.empty() || right.empty()) return node_id;

        importances[static_cast<std::size_t>(best_f)] += n * best_decrease;
        tree.nodes[node_id].feature = best_f;
        tree.nodes[node_id].threshold = best_thr;
        tree.nodes[node_id].left = build(left, depth + 1);
        tree.nodes[node_id].right = build(right, depth + 1);
        return node_id;
    }
};

}  // namespace

void RandomForest::fit(const Matrix& x, const std::vector<int>& labels,
                       int n_trees, int min_samples_split, int max_depth,
                       std::uint64_t seed) {
    n_features_ = x.cols();
    trees_.clear();
    importances_.assign(n_features_, 0.0);
    const std::size_t max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n_features_)))));
    for (int t = 0; t < n_trees; ++t) {
        Rng rng(derive_seed(seed, 0xf07e57, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> boot(x.rows());
        for (auto& b : boot)
            b = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(x.rows()) - 1));
        CartBuilder builder{x, labels, min_samples_split, max_depth,
                            max_features, rng, {}, importances_};
        builder.build(boot, 0);
        trees_.push_back(std::move(builder.tree));
    }
    const double total = std::accumulate(importances_.begin(), importances_.end(), 0.0);
    if (total > 0)
        for (double& v : importances_) v /= total;
}

std::vector<double> RandomForest::predict_proba(const Matrix& x) const {
    std::vector<double> out(x.rows(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (const auto& t : trees_) s += t.predict(x.row_ptr(i));
        out[i] = s / static_cast<double>(trees_.size());
    }
    return out;
}

std::vector<double> RandomForest::feature_importances() const {
    return importances_;
}

// ---------------------------------------------------------------------------
// Gradient boosting

namespace {

struct BoostBuilder {
    const Matrix& x;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    int max_depth;
    double gamma;
    double min_child_weight;
    double lambda = 1.0;
    Tree tree;

    int build(std::vector<std::size_t>& idx, int depth) {
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        double g = 0, h = 0;
        for (std::size_t i : idx) {
            g += grad[i];
            h += hess[i];
        }
        tree.nodes[node_id].value = -g / (h + lambda);
        if (depth >= max_depth || idx.size() < 2) return node_id;

        const double parent_obj = g * g / (h + lambda);
        int best_f = -1;
        double best_thr = 0, best_gain = 0;
        std::vector<std::pair<double, std::size_t>> vals(idx.size());
        for (std::size_t f = 0; f < x.cols(); ++f) {
            for (std::size_t i = 0; i < idx.size(); ++i)
                vals[i] = {x(idx[i], f), idx[i]};
            std::sort(vals.begin(), vals.end());
            double gl = 0, hl = 0;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                gl += grad[vals[i].second];
                hl += hess[vals[i].second];
                if (vals[i].first == vals[i + 1].first) continue;
                const double gr = g - gl, hr = h - hl;
                if (hl < min_child_weight || hr < min_child_weight) continue;
                const double gain =
                    0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                           parent_obj) - gamma;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_f = static_cast<int>(f);
                    best_thr = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        if (best_f < 0) return node_id;

        std::vector<std::size_t> left, right;
        for (std::size_t i : idx)
            (x(i, static_cast<std::size_t>(best_f)) <= best_thr ? left : right)
                .push_back(i);
        if (left.empty() || right.empty()) return node_id;
        tree.nodes[node_id].feature = best_f;
        tree.nodes[node_id].threshold = best_thr;
        tree.nodes[node_id].left = build(left, depth + 1);
        tree.nodes[node_id].right = build(right, depth + 1);
        return node_id;
    }
};

double mean_logistic_loss(const std::vector<double>& margin,
                          const std::vector<int>& labels) {
    double s = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double m = margin[i];
        // log(1 + exp(-y*m)) with y in {-1, +1}, numerically stable
        const double ym = (labels[i] == 1 ? m : -m);
        s += ym > 0 ? std::log1p(std::exp(-ym)) : -ym + std::log1p(std::exp(ym));
    }
    return s / static_cast<double>(labels.size());
}

}  // namespace

void GradientBoosting::fit(const Matrix& x, const std::vector<int>& labels,
                           int n_rounds, int max_depth, double learning_rate,
                           double gamma, double min_child_weight,
                           double subsample, std::uint64_t seed) {
    n_features_ = x.cols();
    learning_rate_ = learning_rate;
    trees_.clear();
    loss_trace_.clear();
    const std::size_t n = x.rows();
    double pos = 0;
    for (int y : labels) pos += y;
    const double prior = std::min(1.0 - 1e-12, std::max(1e-12, pos / static_cast<double>(n)));
    base_score_ = std::log(prior / (1.0 - prior));

    std::vector<double> margin(n, base_score_);
    loss_trace_.push_back(mean_logistic_loss(margin, labels));
    std::vector<double> grad(n), hess(n);
    for (int round = 0; round < n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = p - labels[i];
            hess[i] = std::max(1e-16, p * (1.0 - p));
        }
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        if (subsample < 1.0) {
            Rng rng(derive_seed(seed, 0x6b00, static_cast<std::uint64_t>(round)));
            for (std::size_t i = n; i > 1; --i)
                std::swap(rows[i - 1],
                          rows[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
            rows.resize(std::max<std::size_t>(
                2, static_cast<std::size_t>(std::lround(subsample * static_cast<double>(n)))));
            std::sort(rows.begin(), rows.end());
        }
        BoostBuilder builder{x, grad, hess, max_depth, gamma, min_child_weight};
        builder.build(rows, 0);
        for (std::size_t i = 0; i < n; ++i)
            margin[i] += learning_rate * builder.tree.predict(x.row_ptr(i));
        trees_.push_back(std::move(builder.tree));
        loss_trace_.push_back(mean_logistic_loss(margin, labels));
    }
}

std::vector<double> GradientBoosting::predict_proba(const Matrix& x) const {
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double m = base_score_;
        for (const auto& t : trees_) m += learning_rate_ * t.predict(x.row_ptr(i));
        out[i] = sigmoid(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// AdaBoost with depth-1 stumps

void AdaBoostStumps::fit(const Matrix& x, const std::vector<int>& labels,
                         int n_estimators, double learning_rate,
                         std::uint64_t /*seed*/) {
    n_features_ = x.cols();
    learning_rate_ = learning_rate;
    stumps_.clear();
    const std::size_t n = x.rows();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    const double eps = 1e-10;

    for (int round = 0; round < n_estimators; ++round) {
        // weighted-gini best stump
        int best_f = 0;
        double best_thr = 0, best_imp = 1e18;
        std::vector<std::pair<double, std::size_t>> vals(n);
        double wpos_tot = 0, wtot = 0;
        for (std::size_t i = 0; i < n; ++i) {
            wtot += w[i];
            if (labels[i] == 1) wpos_tot += w[i];
        }
        for (std::size_t f = 0; f < x.cols(); ++f) {
            for (std::size_t i = 0; i < n; ++i) vals[i] = {x(i, f), i};
            std::sort(vals.begin(), vals.end());
            double wl = 0, wlpos = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                wl += w[vals[i].second];
                if (labels[vals[i].second] == 1) wlpos += w[vals[i].second];
                if (vals[i].first == vals[i + 1].first) continue;
                const double wr = wtot - wl, wrpos = wpos_tot - wlpos;
                if (wl <= 0 || wr <= 0) continue;
                const double gl = 2.0 * (wlpos / wl) * (1.0 - wlpos / wl);
                const double gr = 2.0 * (wrpos / wr) * (1.0 - wrpos / wr);
                const double imp = wl * gl + wr * gr;
                if (imp < best_imp - 1e-15) {
                    best_imp = imp;
                    best_f = static_cast<int>(f);
                    best_thr = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        Stump s;
        s.feature = best_f;
        s.threshold = best_thr;
        double wl = 0, wlpos = 0, wr = 0, wrpos = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (x(i, static_cast<std::size_t>(best_f)) <= best_thr) {
                wl += w[i];
                if (labels[i] == 1) wlpos += w[i];
            } else {
                wr += w[i];
                if (labels[i] == 1) wrpos += w[i];
            }
        }
        const double pl = wl > 0 ? wlpos / wl : 0.5;
        const double pr = wr > 0 ? wrpos / wr : 0.5;
        // half log-odds per side (binary SAMME.R)
        s.left_score = 0.5 * (std::log(pl + eps) - std::log(1.0 - pl + eps));
        s.right_score = 0.5 * (std::log(pr + eps) - std::log(1.0 - pr + eps));
        stumps_.push_back(s);

        double wsum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double score = x(i, static_cast<std::size_t>(best_f)) <= best_thr
                                     ? s.left_score
                                     : s.right_score;
            const double y = labels[i] == 1 ? 1.0 : -1.0;
            w[i] *= std::exp(-learning_rate * y * score);
            wsum += w[i];
        }
        if (wsum <= 0) break;
        for (double& wi : w) wi /= wsum;
    }
}

std::vector<double> AdaBoostStumps::predict_proba(const Matrix& x) const {
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double f = 0.0;
        for (const auto& s : stumps_)
            f += x(i, static_cast<std::size_t>(s.feature)) <= s.threshold
                     ? s.left_score
                     : s.right_score;
        out[i] = sigmoid(2.0 * learning_rate_ * f);
    }
    return out;
}

}  // namespace cashml
