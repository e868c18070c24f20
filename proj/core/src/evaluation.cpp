#include "cashml/evaluation.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "cashml/metrics.hpp"
#include "cashml/rng.hpp"

namespace cashml {
namespace {

using nlohmann::json;

struct MetricField {
    const char* name;
    double MetricSet::*member;
};

constexpr MetricField kMetricFields[] = {
    {"auc", &MetricSet::auc},
    {"f1_weighted", &MetricSet::f1_weighted},
    {"bcr", &MetricSet::bcr},
    {"sensitivity", &MetricSet::sensitivity},
    {"specificity", &MetricSet::specificity},
    {"precision", &MetricSet::precision},
    {"recall", &MetricSet::recall},
    {"accuracy", &MetricSet::accuracy},
};

SearchSpace space_for(const EvaluationConfig& cfg, const FeatureDataset& d,
                      const FingerprintReport& fp) {
    const std::size_t n_groups = d.distinct_groups().size();
    return cfg.baseline ? baseline_space(n_groups)
                        : default_space(fp.resampling_enabled, n_groups);
}

FingerprintReport fingerprint_of(const FeatureDataset& d) {
    std::size_t c0 = 0, c1 = 0;
    for (int y : d.labels) (y == 1 ? c1 : c0)++;
    return fingerprint(std::nullopt, c0, c1);
}

}  // namespace

MetricSet EvaluationReport::mean_metrics() const {
    MetricSet m;
    for (const MetricField& f : kMetricFields) {
        double s = 0.0;
        for (const MetricSet& ms : per_split) s += ms.*(f.member);
        m.*(f.member) = s / static_cast<double>(per_split.size());
    }
    return m;
}

EvaluationReport run_nested_cv(const FeatureDataset& d, const EvaluationConfig& cfg) {
    if (cfg.k_test < 2)
        throw std::invalid_argument("nested_cv requires k_test >= 2");
    EvaluationReport rep;
    rep.config_echo = cfg;
    rep.fingerprint_report = fingerprint_of(d);
    const SearchSpace space = space_for(cfg, d, rep.fingerprint_report);

    std::vector<std::vector<RocPoint>> curves;
    double n_train = 0, n_test = 0;
    // outer loop runs sequentially; inner random search parallelizes
    for (int split = 0; split < cfg.k_test; ++split) {
        const SplitPlan plan = stratified_split(
            d, cfg.test_fraction,
            derive_seed(cfg.master_seed, 0x0075, static_cast<std::uint64_t>(split)));
        const FeatureDataset train = d.subset(plan.train_indices);
        const FeatureDataset test = d.subset(plan.test_indices);

        OptimizerConfig opt = cfg.optimizer;
        opt.master_seed = cfg.master_seed;
        opt.outer_split_index = static_cast<std::uint64_t>(split);
        const Ensemble ens = optimize(train, space, opt);

        const std::vector<double> post = ens.predict_proba(test.values);
        rep.per_split.push_back(compute_metrics(test.labels, post));
        curves.push_back(roc_curve(test.labels, post));
        for (const auto& m : ens.members()) rep.member_histogram[m->classifier_name()]++;
        n_train = static_cast<double>(plan.train_indices.size());
        n_test = static_cast<double>(plan.test_indices.size());
    }

    for (const MetricField& f : kMetricFields) {
        std::vector<double> vals;
        for (const MetricSet& m : rep.per_split) vals.push_back(m.*(f.member));
        rep.intervals[f.name] = corrected_resampled_t_ci(vals, n_train, n_test);
    }
    rep.roc_band_result = roc_band(curves);
    rep.mean_roc.clear();
    for (std::size_t g = 0; g < rep.roc_band_result->fpr_grid.size(); ++g)
        rep.mean_roc.push_back({rep.roc_band_result->fpr_grid[g],
                                rep.roc_band_result->mean_tpr[g], 0.0});
    return rep;
}

EvaluationReport run_fixed_split(const FeatureDataset& train,
                                 const FeatureDataset& test,
                                 const EvaluationConfig& cfg) {
    if (train.feature_names != test.feature_names)
        throw std::invalid_argument("train/test feature names differ");
    if (cfg.n_bootstrap < 2)
        throw std::invalid_argument("fixed_split requires n_bootstrap >= 2");
    EvaluationReport rep;
    rep.config_echo = cfg;
    rep.fingerprint_report = fingerprint_of(train);
    if (train.sample_ids == test.sample_ids) {
        rep.leakage_warning = true;
        rep.notes.push_back("test set equals training set; metrics are optimistic");
    }
    const SearchSpace space = space_for(cfg, train, rep.fingerprint_report);

    OptimizerConfig opt = cfg.optimizer;
    opt.master_seed = cfg.master_seed;
    const Ensemble ens = optimize(train, space, opt);
    for (const auto& m : ens.members()) rep.member_histogram[m->classifier_name()]++;

    const std::vector<double> post = ens.predict_proba(test.values);
    const MetricSet point = compute_metrics(test.labels, post);
    rep.per_split.push_back(point);
    rep.mean_roc = roc_curve(test.labels, post);

    // bootstrap over test rows; single-class resamples retried for AUC
    const std::size_t n = test.n_samples();
    std::map<std::string, std::vector<double>> boot;
    Rng rng(derive_seed(cfg.master_seed, 0xb005));
    for (int b = 0; b < cfg.n_bootstrap; ++b) {
        std::vector<std::size_t> rows;
        bool two_classes = false;
        for (int attempt = 0; attempt < 10 && !two_classes; ++attempt) {
            rows.clear();
            for (std::size_t i = 0; i < n; ++i)
                rows.push_back(static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)));
            int c1 = 0;
            for (std::size_t i : rows) c1 += test.labels[i];
            two_classes = c1 > 0 && c1 < static_cast<int>(rows.size());
        }
        std::vector<int> labels;
        std::vector<double> scores;
        for (std::size_t i : rows) {
            labels.push_back(test.labels[i]);
            scores.push_back(post[i]);
        }
        const MetricSet m = two_classes
                                ? compute_metrics(labels, scores)
                                : threshold_metrics(labels, hard_labels(scores));
        if (!two_classes) rep.skipped_bootstrap_auc++;
        for (const MetricField& f : kMetricFields) {
            if (!two_classes && std::string(f.name) == "auc") continue;
            boot[f.name].push_back(m.*(f.member));
        }
    }
    for (const MetricField& f : kMetricFields)
        rep.intervals[f.name] = bootstrap_normal_ci(point.*(f.member), boot[f.name]);
    return rep;
}

std::string report_to_json(const EvaluationReport& rep) {
    json j;
    j["mode"] = rep.config_echo.mode == EvaluationMode::nested_cv ? "nested_cv"
                                                                  : "fixed_split";
    j["config"] = {
        {"k_test", rep.config_echo.k_test},
        {"test_fraction", rep.config_echo.test_fraction},
        {"n_bootstrap", rep.config_echo.n_bootstrap},
        {"n_random_search", rep.config_echo.optimizer.n_random_search},
        {"n_ensemble", rep.config_echo.optimizer.n_ensemble},
        {"k_training", rep.config_echo.optimizer.k_training},
        {"master_seed", rep.config_echo.master_seed},
        {"baseline", rep.config_echo.baseline},
    };
    json splits = json::array();
    for (const MetricSet& m : rep.per_split) {
        json s;
        for (const MetricField& f : kMetricFields) s[f.name] = m.*(f.member);
        splits.push_back(s);
    }
    j["per_split"] = splits;
    const MetricSet mean = rep.mean_metrics();
    json jm;
    for (const MetricField& f : kMetricFields) jm[f.name] = mean.*(f.member);
    j["mean"] = jm;
    json cis;
    for (const auto& [name, ci] : rep.intervals)
        cis[name] = {{"mean", ci.mean},
                     {"lower", ci.lower_clamped()},
                     {"upper", ci.upper_clamped()},
                     {"method", ci.method}};
    j["confidence_intervals"] = cis;
    json fp;
    fp["resampling_enabled"] = rep.fingerprint_report.resampling_enabled;
    fp["rationale"] = rep.fingerprint_report.rationale;
    if (rep.fingerprint_report.normalize_images)
        fp["normalize_images"] = *rep.fingerprint_report.normalize_images;
    if (rep.fingerprint_report.bin_strategy)
        fp["bin_strategy"] = to_string(*rep.fingerprint_report.bin_strategy);
    if (rep.fingerprint_report.feature_dimensionality)
        fp["feature_dimensionality"] =
            to_string(*rep.fingerprint_report.feature_dimensionality);
    j["fingerprint"] = fp;
    j["ensemble_member_histogram"] = rep.member_histogram;
    if (rep.roc_band_result) {
        j["roc_band_half_width"] = rep.roc_band_result->half_width;
    }
    j["skipped_bootstrap_auc"] = rep.skipped_bootstrap_auc;
    j["leakage_warning"] = rep.leakage_warning;
    j["notes"] = rep.notes;
    return j.dump(2);
}

void write_report(const EvaluationReport& rep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "report.json");
        out << report_to_json(rep) << '\n';
    }
    {
        std::ofstream out(fs::path(out_dir) / "summary.csv");
        out << "metric,mean,ci_lower,ci_upper,ci_method\n";
        out.precision(12);
        const MetricSet mean = rep.mean_metrics();
        for (const MetricField& f : kMetricFields) {
            out << f.name << ',' << mean.*(f.member);
            auto it = rep.intervals.find(f.name);
            if (it != rep.intervals.end())
                out << ',' << it->second.lower_clamped() << ','
                    << it->second.upper_clamped() << ',' << it->second.method;
            out << '\n';
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "per_split.csv");
        out << "split";
        for (const MetricField& f : kMetricFields) out << ',' << f.name;
        out << '\n';
        out.precision(12);
        for (std::size_t s = 0; s < rep.per_split.size(); ++s) {
            out << s;
            for (const MetricField& f : kMetricFields)
                out << ',' << rep.per_split[s].*(f.member);
            out << '\n';
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "roc_band.csv");
        out << "fpr,mean_tpr,band_lower,band_upper\n";
        out.precision(12);
        const double hw = rep.roc_band_result ? rep.roc_band_result->half_width : 0.0;
        for (const RocPoint& p : rep.mean_roc)
            out << p.fpr << ',' << p.tpr << ',' << std::max(0.0, p.tpr - hw) << ','
                << std::min(1.0, p.tpr + hw) << '\n';
    }
}

}  // namespace cashml
