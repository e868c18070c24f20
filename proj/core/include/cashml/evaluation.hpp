#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cashml/dataset.hpp"
#include "cashml/fingerprint.hpp"
#include "cashml/optimizer.hpp"
#include "cashml/stats.hpp"

namespace cashml {

enum class EvaluationMode { nested_cv, fixed_split };

struct EvaluationConfig {
    EvaluationMode mode = EvaluationMode::nested_cv;
    int k_test = 100;
    double test_fraction = 0.2;
    int n_bootstrap = 1000;
    OptimizerConfig optimizer;
    std::uint64_t master_seed = 0;
    bool baseline = false;  // restricted LASSO + logistic-regression space
};

struct EvaluationReport {
    std::vector<MetricSet> per_split;
    std::map<std::string, ConfidenceInterval> intervals;
    std::optional<RocBand> roc_band_result;
    std::vector<RocPoint> mean_roc;  // fixed_split: the single test ROC
    FingerprintReport fingerprint_report;
    EvaluationConfig config_echo;
    std::map<std::string, int> member_histogram;  // classifier name -> count
    int skipped_bootstrap_auc = 0;
    bool leakage_warning = false;
    std::vector<std::string> notes;

    MetricSet mean_metrics() const;
};

EvaluationReport run_nested_cv(const FeatureDataset& d, const EvaluationConfig& cfg);

EvaluationReport run_fixed_split(const FeatureDataset& train,
                                 const FeatureDataset& test,
                                 const EvaluationConfig& cfg);

// report.json / summary.csv / per_split.csv / roc_band.csv in out_dir
void write_report(const EvaluationReport& report, const std::string& out_dir);
std::string report_to_json(const EvaluationReport& report);

}  // namespace cashml
