#include "cashml/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>

#include "cashml/metrics.hpp"
#include "cashml/rng.hpp"

namespace cashml {

std::vector<double> Ensemble::predict_proba(const Matrix& x) const {
    std::vector<double> out(x.rows(), 0.0);
    for (std::size_t m = 0; m < members_.size(); ++m) {
        const std::vector<double> p = members_[m]->predict_proba(x);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights_[m] * p[i];
    }
    return out;
}

std::vector<SplitPlan> make_validation_splits(const FeatureDataset& training_set,
                                              int k_training,
                                              double validation_fraction,
                                              std::uint64_t master_seed) {
    std::vector<SplitPlan> splits;
    for (int f = 0; f < k_training; ++f)
        splits.push_back(stratified_split(
            training_set, validation_fraction,
            derive_seed(master_seed, 0xf01d, static_cast<std::uint64_t>(f))));
    return splits;
}

EvaluatedWorkflow evaluate_workflow(const WorkflowConfig& config,
                                    const FeatureDataset& training_set,
                                    const std::vector<SplitPlan>& splits,
                                    std::size_t sample_index) {
    EvaluatedWorkflow ev;
    ev.config = config;
    ev.sample_index = sample_index;
    for (const SplitPlan& split : splits) {
        try {
            const FeatureDataset fit_part = training_set.subset(split.train_indices);
            const FeatureDataset val_part = training_set.subset(split.test_indices);
            const WorkflowPtr wf = fit_workflow(config, fit_part);
            const std::vector<double> post = wf->predict_proba(val_part.values);
            ev.fold_scores.push_back(
                f1_weighted(val_part.labels, hard_labels(post)));
            ev.fold_posteriors.push_back(post);
        } catch (const std::exception& e) {
            ev.failed = true;
            ev.failure_note = e.what();
            ev.fold_scores.clear();
            ev.fold_posteriors.clear();
            ev.mean_score = -1.0;
            return ev;
        }
    }
    ev.mean_score =
        std::accumulate(ev.fold_scores.begin(), ev.fold_scores.end(), 0.0) /
        static_cast<double>(ev.fold_scores.size());
    return ev;
}

std::vector<std::size_t> rank_workflows(const std::vector<EvaluatedWorkflow>& evaluated) {
    if (evaluated.empty()) throw std::invalid_argument("rank_workflows: empty input");
    std::vector<std::size_t> order(evaluated.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return evaluated[a].mean_score > evaluated[b].mean_score;
    });
    return order;
}

namespace {

std::vector<std::size_t> viable_prefix(const std::vector<EvaluatedWorkflow>& evaluated,
                                       const std::vector<std::size_t>& ranked) {
    std::vector<std::size_t> out;
    for (std::size_t i : ranked)
        if (!evaluated[i].failed) out.push_back(i);
    if (out.empty()) throw std::runtime_error("no viable workflow");
    return out;
}

Ensemble refit_uniform(const std::vector<EvaluatedWorkflow>& evaluated,
                       const std::vector<std::size_t>& chosen,
                       const FeatureDataset& training_set, EnsembleMethod method) {
    std::vector<WorkflowPtr> members;
    for (std::size_t i : chosen)
        members.push_back(fit_workflow(evaluated[i].config, training_set));
    std::vector<double> weights(members.size(),
                                1.0 / static_cast<double>(members.size()));
    return Ensemble(std::move(members), std::move(weights), method);
}

// Mean validation F1_w of averaging the stored per-fold posteriors of the
// given member set (weights optional).
double ensemble_validation_score(const std::vector<EvaluatedWorkflow>& evaluated,
                                 const std::vector<std::size_t>& members,
                                 const std::vector<double>& weights,
                                 const FeatureDataset& training_set,
                                 const std::vector<SplitPlan>& splits) {
    double total = 0.0;
    for (std::size_t f = 0; f < splits.size(); ++f) {
        const std::size_t n_val = splits[f].test_indices.size();
        std::vector<double> avg(n_val, 0.0);
        double wsum = 0.0;
        for (std::size_t m = 0; m < members.size(); ++m) {
            const double w = weights.empty() ? 1.0 : weights[m];
            const auto& post = evaluated[members[m]].fold_posteriors[f];
            for (std::size_t i = 0; i < n_val; ++i) avg[i] += w * post[i];
            wsum += w;
        }
        for (double& v : avg) v /= wsum;
        std::vector<int> val_labels;
        for (std::size_t i : splits[f].test_indices)
            val_labels.push_back(training_set.labels[i]);
        total += f1_weighted(val_labels, hard_labels(avg));
    }
    return total / static_cast<double>(splits.size());
}

}  // namespace

Ensemble build_topn(const std::vector<EvaluatedWorkflow>& evaluated,
                    const std::vector<std::size_t>& ranked, int n_ensemble,
                    const FeatureDataset& training_set) {
    if (n_ensemble < 1) throw std::invalid_argument("build_topn: n_ensemble >= 1");
    std::vector<std::size_t> pool = viable_prefix(evaluated, ranked);
    pool.resize(std::min<std::size_t>(pool.size(), n_ensemble));
    return refit_uniform(evaluated, pool, training_set, EnsembleMethod::top_n);
}

Ensemble build_fitnumber(const std::vector<EvaluatedWorkflow>& evaluated,
                         const std::vector<std::size_t>& ranked,
                         const std::vector<SplitPlan>& splits,
                         const FeatureDataset& training_set) {
    const std::vector<std::size_t> pool = viable_prefix(evaluated, ranked);
    const std::size_t max_j = std::min<std::size_t>(100, pool.size());
    std::size_t best_j = 1;
    double best_score = -1.0;
    for (std::size_t j = 1; j <= max_j; ++j) {
        const std::vector<std::size_t> members(pool.begin(), pool.begin() + j);
        const double score = ensemble_validation_score(evaluated, members, {},
                                                       training_set, splits);
        if (score > best_score + 1e-12) {
            best_score = score;
            best_j = j;
        }
    }
    std::vector<std::size_t> chosen(pool.begin(), pool.begin() + best_j);
    return refit_uniform(evaluated, chosen, training_set,
                         EnsembleMethod::fit_number);
}

Ensemble build_forward_selection(const std::vector<EvaluatedWorkflow>& evaluated,
                                 const std::vector<std::size_t>& ranked,
                                 const std::vector<SplitPlan>& splits,
                                 const FeatureDataset& training_set, int n_bags,
                                 double bag_fraction, int max_rounds,
                                 std::uint64_t seed) {
    const std::vector<std::size_t> pool = viable_prefix(evaluated, ranked);
    std::vector<std::size_t> counts(pool.size(), 0);

    for (int bag = 0; bag < n_bags; ++bag) {
        Rng rng(derive_seed(seed, 0xba6, static_cast<std::uint64_t>(bag)));
        std::vector<std::size_t> cand(pool.size());
        std::iota(cand.begin(), cand.end(), std::size_t{0});
        for (std::size_t i = cand.size(); i > 1; --i)
            std::swap(cand[i - 1],
                      cand[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
        const std::size_t bag_size = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::lround(
                   bag_fraction * static_cast<double>(cand.size()))));
        cand.resize(bag_size);
        std::sort(cand.begin(), cand.end());  // earlier rank first for ties

        // greedy with repetition, tracked as per-fold posterior sums
        std::vector<std::vector<double>> sum(splits.size());
        for (std::size_t f = 0; f < splits.size(); ++f)
            sum[f].assign(splits[f].test_indices.size(), 0.0);
        std::size_t picked = 0;
        for (int round = 0; round < max_rounds; ++round) {
            std::size_t best_c = cand[0];
            double best_score = -2.0;
            for (std::size_t c : cand) {
                double total = 0.0;
                for (std::size_t f = 0; f < splits.size(); ++f) {
                    const auto& post = evaluated[pool[c]].fold_posteriors[f];
                    std::vector<double> avg(sum[f].size());
                    for (std::size_t i = 0; i < avg.size(); ++i)
                        avg[i] = (sum[f][i] + post[i]) /
                                 static_cast<double>(picked + 1);
                    std::vector<int> val_labels;
                    for (std::size_t i : splits[f].test_indices)
                        val_labels.push_back(training_set.labels[i]);
                    total += f1_weighted(val_labels, hard_labels(avg));
                }
                const double score = total / static_cast<double>(splits.size());
                if (score > best_score + 1e-12) {
                    best_score = score;
                    best_c = c;
                }
            }
            counts[best_c]++;
            ++picked;
            for (std::size_t f = 0; f < splits.size(); ++f) {
                const auto& post = evaluated[pool[best_c]].fold_posteriors[f];
                for (std::size_t i = 0; i < sum[f].size(); ++i)
                    sum[f][i] += post[i];
            }
        }
    }

    std::vector<WorkflowPtr> members;
    std::vector<double> weights;
    const double total = static_cast<double>(n_bags) * max_rounds;
    for (std::size_t c = 0; c < pool.size(); ++c) {
        if (counts[c] == 0) continue;  // never selected: weight 0, no refit
        members.push_back(fit_workflow(evaluated[pool[c]].config, training_set));
        weights.push_back(static_cast<double>(counts[c]) / total);
    }
    return Ensemble(std::move(members), std::move(weights),
                    EnsembleMethod::forward_selection);
}

Ensemble optimize(const FeatureDataset& training_set, const SearchSpace& space,
                  const OptimizerConfig& cfg) {
    const std::vector<SplitPlan> splits = make_validation_splits(
        training_set, cfg.k_training, cfg.validation_fraction, cfg.master_seed);

    const std::size_t n = static_cast<std::size_t>(cfg.n_random_search);
    std::vector<EvaluatedWorkflow> evaluated(n);
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, cfg.n_workers);
    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            const WorkflowConfig config = sample(
                space, derive_seed(cfg.master_seed, cfg.outer_split_index, i));
            evaluated[i] = evaluate_workflow(config, training_set, splits, i);
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (cfg.log)
        for (std::size_t i = 0; i < n; ++i)
            *cfg.log << i << '\t' << evaluated[i].mean_score << '\t'
                     << evaluated[i].config.digest() << '\n';

    const std::vector<std::size_t> ranked = rank_workflows(evaluated);
    switch (cfg.ensemble_method) {
        case EnsembleMethod::top_n:
            return build_topn(evaluated, ranked, cfg.n_ensemble, training_set);
        case EnsembleMethod::fit_number:
            return build_fitnumber(evaluated, ranked, splits, training_set);
        case EnsembleMethod::forward_selection:
            return build_forward_selection(evaluated, ranked, splits, training_set,
                                           cfg.fs_n_bags, cfg.fs_bag_fraction,
                                           cfg.fs_max_rounds,
                                           derive_seed(cfg.master_seed, 0xf5));
    }
    throw std::logic_error("unknown ensemble method");
}

}  // namespace cashml
