#include "cashml/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cashml {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a == 0 || a != b)
        throw std::invalid_argument("label/prediction vectors must be same nonzero length");
}

}  // namespace

double f1_weighted(const std::vector<int>& labels, const std::vector<int>& predictions) {
    check_lengths(labels.size(), predictions.size());
    double total = static_cast<double>(labels.size());
    double sum = 0.0;
    for (int c = 0; c <= 1; ++c) {
        double tp = 0, fp = 0, fn = 0, nc = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) ++nc;
            if (predictions[i] == c && labels[i] == c) ++tp;
            if (predictions[i] == c && labels[i] != c) ++fp;
            if (predictions[i] != c && labels[i] == c) ++fn;
        }
        const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        const double f1 = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        sum += (nc / total) * f1;
    }
    return sum;
}

double auc(const std::vector<int>& labels, const std::vector<double>& scores) {
    check_lengths(labels.size(), scores.size());
    // rank-sum formulation with midranks for ties: O(n log n)
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double n_pos = 0, n_neg = 0;
    for (int y : labels) (y == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc requires both classes");
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += midrank;
        i = j;
    }
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
}

MetricSet threshold_metrics(const std::vector<int>& labels,
                            const std::vector<int>& predictions) {
    check_lengths(labels.size(), predictions.size());
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1)
            (predictions[i] == 1 ? tp : fn)++;
        else
            (predictions[i] == 0 ? tn : fp)++;
    }
    MetricSet m;
    auto ratio = [&m](double num, double den) {
        if (den <= 0) {
            m.degenerate = true;
            return 0.0;
        }
        return num / den;
    };
    m.sensitivity = ratio(tp, tp + fn);
    m.specificity = ratio(tn, tn + fp);
    m.precision = ratio(tp, tp + fp);
    m.recall = m.sensitivity;
    m.accuracy = (tp + tn) / static_cast<double>(labels.size());
    m.bcr = 0.5 * (m.sensitivity + m.specificity);
    m.f1_weighted = f1_weighted(labels, predictions);
    return m;
}

std::vector<int> hard_labels(const std::vector<double>& scores, double threshold) {
    std::vector<int> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        out[i] = scores[i] >= threshold ? 1 : 0;
    return out;
}

MetricSet compute_metrics(const std::vector<int>& labels,
                          const std::vector<double>& scores) {
    MetricSet m = threshold_metrics(labels, hard_labels(scores));
    m.auc = auc(labels, scores);
    return m;
}

std::vector<RocPoint> roc_curve(const std::vector<int>& labels,
                                const std::vector<double>& scores) {
    check_lengths(labels.size(), scores.size());
    double n_pos = 0, n_neg = 0;
    for (int y : labels) (y == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_curve requires both classes");

    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> curve;
    curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    double tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] == 1 ? tp : fp)++;
            ++i;
        }
        curve.push_back({fp / n_neg, tp / n_pos, s});
    }
    return curve;
}

}  // namespace cashml
