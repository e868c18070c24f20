// cashml: run AutoML experiments, generate synthetic data, inspect reports.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cashml/evaluation.hpp"
#include "cashml/rng.hpp"
#include "cashml/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

int default_workers() {
    if (const char* env = std::getenv("CASHML_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// FNV-1a over file bytes; enough to detect input drift in manifests.
std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "unreadable";
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

struct RunFlags {
    std::string config_path, data_path, train_path, test_path;
    std::string labels_column = "label";
    std::string groups_path, out_dir = "results";
    std::string mode = "nested";
    std::string ensemble = "top_n";
    std::uint64_t seed = 0;
    int workers = default_workers();
    bool baseline = false;
    int krs = 1000, kens = 100, ktest = 100, ktraining = 5, n_bootstrap = 1000;
    double test_fraction = 0.2;
    std::string positive_class;
};

void apply_config_file(RunFlags& f) {
    if (f.config_path.empty()) return;
    std::ifstream in(f.config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + f.config_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw CLI::ValidationError("--config", std::string("parse error: ") + e.what());
    }
    auto get = [&](const char* section, const char* key, auto& target) {
        if (j.contains(section) && j[section].contains(key))
            j[section][key].get_to(target);
    };
    get("run", "mode", f.mode);
    get("run", "seed", f.seed);
    get("run", "baseline", f.baseline);
    get("run", "workers", f.workers);
    get("data", "path", f.data_path);
    get("data", "labels_column", f.labels_column);
    get("data", "groups", f.groups_path);
    get("data", "positive_class", f.positive_class);
    get("data", "train", f.train_path);
    get("data", "test", f.test_path);
    get("optimizer", "n_random_search", f.krs);
    get("optimizer", "n_ensemble", f.kens);
    get("optimizer", "k_training", f.ktraining);
    get("optimizer", "ensemble_method", f.ensemble);
    get("evaluation", "k_test", f.ktest);
    get("evaluation", "test_fraction", f.test_fraction);
    get("evaluation", "n_bootstrap", f.n_bootstrap);
}

cashml::EvaluationConfig to_eval_config(const RunFlags& f) {
    cashml::EvaluationConfig cfg;
    cfg.mode = f.mode == "fixed" ? cashml::EvaluationMode::fixed_split
                                 : cashml::EvaluationMode::nested_cv;
    cfg.k_test = f.ktest;
    cfg.test_fraction = f.test_fraction;
    cfg.n_bootstrap = f.n_bootstrap;
    cfg.master_seed = f.seed;
    cfg.baseline = f.baseline;
    cfg.optimizer.n_random_search = f.krs;
    cfg.optimizer.n_ensemble = f.kens;
    cfg.optimizer.k_training = f.ktraining;
    cfg.optimizer.n_workers = f.workers;
    if (f.ensemble == "fit_number")
        cfg.optimizer.ensemble_method = cashml::EnsembleMethod::fit_number;
    else if (f.ensemble == "forward_selection")
        cfg.optimizer.ensemble_method = cashml::EnsembleMethod::forward_selection;
    else
        cfg.optimizer.ensemble_method = cashml::EnsembleMethod::top_n;
    return cfg;
}

cashml::FeatureDataset load_dataset(const std::string& path, const RunFlags& f) {
    cashml::CsvOptions opts;
    opts.label_column = f.labels_column;
    if (!f.groups_path.empty()) opts.groups_path = f.groups_path;
    if (!f.positive_class.empty()) opts.positive_class = f.positive_class;
    return cashml::load_csv(path, opts);
}

json flags_echo(const RunFlags& f) {
    return json{
        {"mode", f.mode},
        {"baseline", f.baseline},
        {"seed", f.seed},
        {"workers", f.workers},
        {"labels_column", f.labels_column},
        {"ensemble_method", f.ensemble},
        {"n_random_search", f.krs},
        {"n_ensemble", f.kens},
        {"k_training", f.ktraining},
        {"k_test", f.ktest},
        {"test_fraction", f.test_fraction},
        {"n_bootstrap", f.n_bootstrap},
    };
}

int cmd_run(const RunFlags& flags_in) {
    RunFlags f = flags_in;
    apply_config_file(f);
    const bool fixed = f.mode == "fixed";
    if (f.mode != "nested" && f.mode != "fixed") {
        std::cerr << "error: --mode must be 'nested' or 'fixed'\n";
        return kExitInput;
    }
    if (!fixed && f.data_path.empty()) {
        std::cerr << "error: --data is required in nested mode\n";
        return kExitInput;
    }
    if (fixed && (f.train_path.empty() || f.test_path.empty())) {
        std::cerr << "error: fixed mode requires --train and --test\n";
        return kExitInput;
    }

    const auto t0 = std::chrono::steady_clock::now();
    json manifest;
    manifest["command"] = fixed ? "run --mode fixed" : "run --mode nested";
    manifest["engine_version"] = kVersion;
    manifest["master_seed"] = f.seed;
    manifest["config_file"] = f.config_path;
    manifest["flags"] = flags_echo(f);

    cashml::EvaluationConfig cfg = to_eval_config(f);
    fs::create_directories(f.out_dir);
    std::ofstream wf_log(fs::path(f.out_dir) / "workflow_log.tsv");
    wf_log << "index\tvalidation_f1w\tconfig\n";
    cfg.optimizer.log = &wf_log;

    cashml::EvaluationReport report;
    double load_seconds = 0.0;
    try {
        if (fixed) {
            const cashml::FeatureDataset train = load_dataset(f.train_path, f);
            const cashml::FeatureDataset test = load_dataset(f.test_path, f);
            manifest["dataset_digests"] = {{"train", file_digest(f.train_path)},
                                           {"test", file_digest(f.test_path)}};
            load_seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
            report = cashml::run_fixed_split(train, test, cfg);
        } else {
            const cashml::FeatureDataset d = load_dataset(f.data_path, f);
            manifest["dataset_digests"] = {{"data", file_digest(f.data_path)}};
            load_seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
            report = cashml::run_nested_cv(d, cfg);
        }
    } catch (const cashml::LoadError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }

    cashml::write_report(report, f.out_dir);
    manifest["timings_seconds"] = {
        {"load", load_seconds},
        {"total", std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                t0)
                      .count()},
    };
    std::ofstream(fs::path(f.out_dir) / "manifest.json") << manifest.dump(2) << '\n';

    const cashml::MetricSet mean = report.mean_metrics();
    std::cout << "done: mean auc " << mean.auc << ", mean f1_weighted "
              << mean.f1_weighted << " -> " << f.out_dir << '\n';
    if (report.leakage_warning)
        std::cout << "warning: test set equals training set\n";
    return 0;
}

int cmd_synth(const cashml::SynthSpec& spec, const std::string& out_path,
              const std::string& groups_out) {
    try {
        const cashml::FeatureDataset d = cashml::generate(spec);
        cashml::write_csv(d, out_path);
        if (!groups_out.empty()) cashml::write_groups_csv(d, groups_out);
        std::cout << "wrote " << d.n_samples() << " samples x " << d.n_features()
                  << " features -> " << out_path << '\n';
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_inspect(const std::string& path, const std::string& metric) {
    fs::path p(path);
    if (fs::is_directory(p)) p /= "report.json";
    std::ifstream in(p);
    if (!in) {
        std::cerr << "input error: cannot open " << p.string() << '\n';
        return kExitInput;
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        std::cerr << "input error: corrupt report: " << e.what() << '\n';
        return kExitInput;
    }
    if (!j.contains("mean") || !j.contains("confidence_intervals")) {
        std::cerr << "input error: " << p.string() << " is not a run report\n";
        return kExitInput;
    }
    std::cout << "metric            mean    95% CI\n";
    for (const auto& [name, value] : j["mean"].items()) {
        if (!metric.empty() && name != metric) continue;
        std::ostringstream row;
        row.precision(3);
        row << std::fixed << name;
        for (std::size_t s = name.size(); s < 16; ++s) row << ' ';
        row << "  " << value.get<double>();
        const auto& cis = j["confidence_intervals"];
        if (cis.contains(name))
            row << "   [" << cis[name]["lower"].get<double>() << ", "
                << cis[name]["upper"].get<double>() << "]";
        std::cout << row.str() << '\n';
    }
    if (j.contains("ensemble_member_histogram") && metric.empty()) {
        std::cout << "\nensemble members\n";
        for (const auto& [name, count] : j["ensemble_member_histogram"].items())
            std::cout << "  " << name << ": " << count.get<int>() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AutoML engine: random-search pipeline optimization with "
                 "ensembling and nested cross-validation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    RunFlags rf;
    CLI::App* run = app.add_subcommand("run", "Run an experiment");
    run->add_option("--config", rf.config_path, "JSON config file");
    run->add_option("--data", rf.data_path, "feature CSV (nested mode)");
    run->add_option("--labels-column", rf.labels_column, "label column name");
    run->add_option("--groups", rf.groups_path, "feature-group CSV");
    run->add_option("--positive-class", rf.positive_class,
                    "label value mapped to class 1");
    run->add_option("--out", rf.out_dir, "output directory");
    run->add_option("--seed", rf.seed, "master seed");
    run->add_option("--workers", rf.workers,
                    "parallel workers (env CASHML_WORKERS)");
    run->add_flag("--baseline", rf.baseline,
                  "restricted LASSO + logistic-regression search space");
    run->add_option("--mode", rf.mode, "nested | fixed")
        ->check(CLI::IsMember({"nested", "fixed"}));
    run->add_option("--train", rf.train_path, "training CSV (fixed mode)");
    run->add_option("--test", rf.test_path, "test CSV (fixed mode)");
    run->add_option("--krs", rf.krs, "random-search samples per split");
    run->add_option("--kens", rf.kens, "ensemble size (top-N)");
    run->add_option("--ktest", rf.ktest, "outer test splits (nested mode)");
    run->add_option("--ktraining", rf.ktraining, "validation splits per workflow");
    run->add_option("--ensemble", rf.ensemble,
                    "top_n | fit_number | forward_selection")
        ->check(CLI::IsMember({"top_n", "fit_number", "forward_selection"}));

    cashml::SynthSpec spec;
    std::string synth_out = "synth.csv", synth_groups_out;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--n", spec.n_samples, "samples");
    synth->add_option("--signal", spec.n_signal_features, "signal features");
    synth->add_option("--noise", spec.n_noise_features, "noise features");
    synth->add_option("--sep", spec.class_separation, "class separation");
    synth->add_option("--ratio", spec.class_ratio, "class-1 fraction");
    synth->add_option("--missing", spec.missing_fraction, "missing-cell fraction");
    synth->add_option("--seed", spec.seed, "seed");
    synth->add_option("--out", synth_out, "output CSV");
    synth->add_option("--groups-out", synth_groups_out, "optional groups CSV");

    std::string inspect_path, inspect_metric;
    CLI::App* inspect = app.add_subcommand("inspect", "Summarize a run report");
    inspect->add_option("path", inspect_path, "report.json or run directory")
        ->required();
    inspect->add_option("--metric", inspect_metric, "show a single metric");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    if (run->parsed()) return cmd_run(rf);
    if (synth->parsed()) return cmd_synth(spec, synth_out, synth_groups_out);
    return cmd_inspect(inspect_path, inspect_metric);
}
