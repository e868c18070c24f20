#include "cashml/search_space.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cashml {

Distribution Distribution::bernoulli(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("bernoulli p outside [0,1]");
    Distribution d;
    d.kind = Kind::bernoulli;
    d.p = p;
    return d;
}

Distribution Distribution::categorical(int n) {
    if (n < 1) throw std::invalid_argument("categorical needs >=1 option");
    Distribution d;
    d.kind = Kind::categorical;
    d.n_categories = n;
    return d;
}

Distribution Distribution::uniform(double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("uniform: lo > hi");
    Distribution d;
    d.kind = Kind::uniform;
    d.lo = lo;
    d.hi = hi;
    return d;
}

Distribution Distribution::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
    Distribution d;
    d.kind = Kind::uniform_int;
    d.ilo = lo;
    d.ihi = hi;
    return d;
}

Distribution Distribution::log_uniform(double lo, double hi) {
    if (lo <= 0.0 || hi <= 0.0 || lo > hi)
        throw std::invalid_argument("log_uniform bounds must be positive, lo <= hi");
    Distribution d;
    d.kind = Kind::log_uniform;
    d.lo = lo;
    d.hi = hi;
    return d;
}

double Distribution::sample_real(Rng& rng) const {
    switch (kind) {
        case Kind::bernoulli: return rng.bernoulli(p) ? 1.0 : 0.0;
        case Kind::categorical:
            return static_cast<double>(rng.uniform_int(0, n_categories - 1));
        case Kind::uniform: return rng.uniform(lo, hi);
        case Kind::uniform_int:
            return static_cast<double>(rng.uniform_int(ilo, ihi));
        case Kind::log_uniform:
            return std::pow(10.0, rng.uniform(std::log10(lo), std::log10(hi)));
    }
    return 0.0;
}

std::int64_t Distribution::sample_int(Rng& rng) const {
    switch (kind) {
        case Kind::categorical: return rng.uniform_int(0, n_categories - 1);
        case Kind::uniform_int: return rng.uniform_int(ilo, ihi);
        default: return static_cast<std::int64_t>(sample_real(rng));
    }
}

bool Distribution::sample_bool(Rng& rng) const {
    if (kind != Kind::bernoulli) throw std::logic_error("sample_bool on non-bernoulli");
    return rng.bernoulli(p);
}

const Distribution& SearchSpace::at(const std::string& name) const {
    auto it = dists.find(name);
    if (it == dists.end()) throw std::out_of_range("unknown hyperparameter: " + name);
    return it->second;
}

SearchSpace default_space(bool resampling_enabled, std::size_t n_groups) {
    SearchSpace s;
    s.n_groups = n_groups;
    s.resampling_enabled = resampling_enabled;
    auto& d = s.dists;

    // step 1: group-wise selection
    d["groupwise.activator"] = Distribution::bernoulli(1.0);
    d["groupwise.group_activator"] = Distribution::bernoulli(0.5);
    // step 2: imputation
    d["impute.selector"] = Distribution::categorical(5);
    d["impute.knn_neighbors"] = Distribution::uniform_int(5, 10);
    // step 3: variance threshold
    d["variance.activator"] = Distribution::bernoulli(1.0);
    // step 4: robust z-scoring has no hyperparameters
    // step 5: RELIEF
    d["relief.activator"] = Distribution::bernoulli(0.2);
    d["relief.neighbors"] = Distribution::uniform_int(2, 6);
    d["relief.sample_size"] = Distribution::uniform(0.75, 0.95);
    d["relief.distance_p"] = Distribution::uniform_int(1, 4);
    d["relief.n_features"] = Distribution::uniform_int(10, 50);
    // step 6: SelectFromModel
    d["sfm.activator"] = Distribution::bernoulli(0.2);
    d["sfm.type"] = Distribution::categorical(3);
    d["sfm.lasso_alpha"] = Distribution::uniform(0.1, 1.5);
    d["sfm.rf_trees"] = Distribution::uniform_int(10, 100);
    // step 7: PCA
    d["pca.activator"] = Distribution::bernoulli(0.2);
    d["pca.type"] = Distribution::categorical(4);
    // step 8: univariate testing
    d["univariate.activator"] = Distribution::bernoulli(0.2);
    d["univariate.threshold"] =
        Distribution::log_uniform(1e-3, std::pow(10.0, -2.5));
    // step 9: resampling
    d["resample.activator"] =
        Distribution::bernoulli(resampling_enabled ? 0.2 : 0.0);
    d["resample.selector"] = Distribution::uniform_int(1, 6);
    d["resample.strategy"] = Distribution::categorical(4);
    d["resample.neighbors"] = Distribution::uniform_int(3, 15);
    d["resample.cleaning_threshold"] = Distribution::uniform(0.25, 0.75);
    d["resample.smote_type"] = Distribution::categorical(4);
    // step 10: classification
    d["clf.selector"] = Distribution::uniform_int(1, 8);
    d["clf.svm.kernel"] = Distribution::categorical(3);
    d["clf.svm.regularization"] = Distribution::log_uniform(1.0, 1e6);
    d["clf.svm.degree"] = Distribution::uniform_int(1, 7);
    d["clf.svm.homogeneity"] = Distribution::uniform(0.0, 1.0);
    d["clf.svm.rbf_gamma"] = Distribution::log_uniform(1e-5, 1e5);
    d["clf.rf.n_trees"] = Distribution::uniform_int(10, 100);
    d["clf.rf.min_samples_split"] = Distribution::uniform_int(2, 5);
    d["clf.rf.max_depth"] = Distribution::uniform_int(5, 10);
    d["clf.lr.regularization"] = Distribution::uniform(0.01, 1.0);
    d["clf.lr.solver"] = Distribution::categorical(2);
    d["clf.lr.penalty"] = Distribution::categorical(3);
    d["clf.lr.l1_ratio"] = Distribution::uniform(0.0, 1.0);
    d["clf.lda.solver"] = Distribution::categorical(3);
    d["clf.lda.shrinkage"] = Distribution::log_uniform(1e-5, 1e5);
    d["clf.qda.regularization"] = Distribution::log_uniform(1e-5, 1e5);
    d["clf.gnb.regularization"] = Distribution::uniform(0.0, 1.0);
    d["clf.adaboost.n_estimators"] = Distribution::uniform_int(10, 100);
    d["clf.adaboost.learning_rate"] = Distribution::log_uniform(0.01, 1.0);
    d["clf.xgb.n_rounds"] = Distribution::uniform_int(10, 100);
    d["clf.xgb.max_depth"] = Distribution::uniform_int(3, 15);
    d["clf.xgb.learning_rate"] = Distribution::log_uniform(0.01, 1.0);
    d["clf.xgb.gamma"] = Distribution::uniform(0.01, 10.0);
    d["clf.xgb.min_child_weight"] = Distribution::uniform_int(1, 7);
    d["clf.xgb.subsample"] = Distribution::uniform(0.3, 1.0);

    s.impute_options = {ImputeMethod::mean, ImputeMethod::median, ImputeMethod::mode,
                        ImputeMethod::constant_zero, ImputeMethod::knn};
    s.sfm_options = {SfmModel::lasso, SfmModel::logistic_regression,
                     SfmModel::random_forest};
    s.classifier_options = {
        ClassifierChoice::svm,        ClassifierChoice::random_forest,
        ClassifierChoice::logistic_regression, ClassifierChoice::lda,
        ClassifierChoice::qda,        ClassifierChoice::gaussian_nb,
        ClassifierChoice::adaboost,   ClassifierChoice::xgboost};
    return s;
}

SearchSpace baseline_space(std::size_t n_groups) {
    SearchSpace s = default_space(false, n_groups);
    auto& d = s.dists;
    // keep all features, no stochastic group dropout
    d["groupwise.group_activator"] = Distribution::bernoulli(1.0);
    d["variance.activator"] = Distribution::bernoulli(0.0);
    d["relief.activator"] = Distribution::bernoulli(0.0);
    d["pca.activator"] = Distribution::bernoulli(0.0);
    d["univariate.activator"] = Distribution::bernoulli(0.0);
    d["resample.activator"] = Distribution::bernoulli(0.0);
    // mandatory LASSO selection, logistic regression only
    d["sfm.activator"] = Distribution::bernoulli(1.0);
    d["sfm.type"] = Distribution::categorical(1);
    d["clf.selector"] = Distribution::uniform_int(1, 1);
    s.sfm_options = {SfmModel::lasso};
    s.classifier_options = {ClassifierChoice::logistic_regression};
    return s;
}

namespace {

// Strategy categories valid per method: undersamplers never target the
// minority class, oversamplers never target the majority class.
ResampleStrategy strategy_for(ResampleMethod m, std::int64_t idx) {
    static const ResampleStrategy under[4] = {
        ResampleStrategy::not_minority, ResampleStrategy::majority,
        ResampleStrategy::not_majority, ResampleStrategy::all};
    static const ResampleStrategy over[4] = {
        ResampleStrategy::minority, ResampleStrategy::not_minority,
        ResampleStrategy::not_majority, ResampleStrategy::all};
    const bool is_under = m == ResampleMethod::random_under ||
                          m == ResampleMethod::near_miss ||
                          m == ResampleMethod::neighborhood_cleaning;
    return is_under ? under[idx] : over[idx];
}

}  // namespace

WorkflowConfig sample(const SearchSpace& space, std::uint64_t seed) {
    Rng rng(seed);
    WorkflowConfig c;
    c.rng_seed = derive_seed(seed, 0xc0f1);

    // Sampling order is fixed (the order below) so a seed fully determines
    // the config; every field is drawn even when its activator is off.
    space.at("groupwise.activator").sample_bool(rng);  // B(1.0), always on
    c.group_activators.resize(space.n_groups);
    for (std::size_t g = 0; g < space.n_groups; ++g)
        c.group_activators[g] = space.at("groupwise.group_activator").sample_bool(rng);

    c.impute_method = space.impute_options[static_cast<std::size_t>(
        space.at("impute.selector").sample_int(rng)) % space.impute_options.size()];
    c.knn_impute_neighbors =
        static_cast<int>(space.at("impute.knn_neighbors").sample_int(rng));

    c.variance_threshold_on = space.at("variance.activator").sample_bool(rng);

    c.relief_on = space.at("relief.activator").sample_bool(rng);
    c.relief_neighbors = static_cast<int>(space.at("relief.neighbors").sample_int(rng));
    c.relief_sample_fraction = space.at("relief.sample_size").sample_real(rng);
    c.relief_distance_p =
        static_cast<int>(space.at("relief.distance_p").sample_int(rng));
    c.relief_n_features =
        static_cast<int>(space.at("relief.n_features").sample_int(rng));

    c.sfm_on = space.at("sfm.activator").sample_bool(rng);
    c.sfm_model = space.sfm_options[static_cast<std::size_t>(
        space.at("sfm.type").sample_int(rng)) % space.sfm_options.size()];
    c.sfm_lasso_alpha = space.at("sfm.lasso_alpha").sample_real(rng);
    c.sfm_rf_trees = static_cast<int>(space.at("sfm.rf_trees").sample_int(rng));

    c.pca_on = space.at("pca.activator").sample_bool(rng);
    c.pca_variant =
        static_cast<PcaVariant>(space.at("pca.type").sample_int(rng));

    c.univariate_on = space.at("univariate.activator").sample_bool(rng);
    c.univariate_p_threshold = space.at("univariate.threshold").sample_real(rng);

    c.resample_on = space.at("resample.activator").sample_bool(rng);
    c.resample_method = static_cast<ResampleMethod>(
        space.at("resample.selector").sample_int(rng) - 1);
    c.resample_strategy = strategy_for(
        c.resample_method, space.at("resample.strategy").sample_int(rng));
    c.resample_neighbors =
        static_cast<int>(space.at("resample.neighbors").sample_int(rng));
    c.cleaning_threshold = space.at("resample.cleaning_threshold").sample_real(rng);
    c.smote_kind =
        static_cast<SmoteKind>(space.at("resample.smote_type").sample_int(rng));

    c.classifier = space.classifier_options[static_cast<std::size_t>(
        space.at("clf.selector").sample_int(rng) - 1) %
        space.classifier_options.size()];
    c.svm_kernel = static_cast<SvmKernel>(space.at("clf.svm.kernel").sample_int(rng));
    c.svm_regularization = space.at("clf.svm.regularization").sample_real(rng);
    c.svm_degree = static_cast<int>(space.at("clf.svm.degree").sample_int(rng));
    c.svm_coef0 = space.at("clf.svm.homogeneity").sample_real(rng);
    c.svm_gamma = space.at("clf.svm.rbf_gamma").sample_real(rng);
    c.rf_trees = static_cast<int>(space.at("clf.rf.n_trees").sample_int(rng));
    c.rf_min_samples_split =
        static_cast<int>(space.at("clf.rf.min_samples_split").sample_int(rng));
    c.rf_max_depth = static_cast<int>(space.at("clf.rf.max_depth").sample_int(rng));
    c.lr_regularization = space.at("clf.lr.regularization").sample_real(rng);
    c.lr_solver = static_cast<int>(space.at("clf.lr.solver").sample_int(rng));
    c.lr_penalty = static_cast<LrPenalty>(space.at("clf.lr.penalty").sample_int(rng));
    c.lr_l1_ratio = space.at("clf.lr.l1_ratio").sample_real(rng);
    c.lda_solver = static_cast<int>(space.at("clf.lda.solver").sample_int(rng));
    c.lda_shrinkage = space.at("clf.lda.shrinkage").sample_real(rng);
    c.qda_regularization = space.at("clf.qda.regularization").sample_real(rng);
    c.gnb_regularization = space.at("clf.gnb.regularization").sample_real(rng);
    c.ada_n_estimators =
        static_cast<int>(space.at("clf.adaboost.n_estimators").sample_int(rng));
    c.ada_learning_rate = space.at("clf.adaboost.learning_rate").sample_real(rng);
    c.xgb_rounds = static_cast<int>(space.at("clf.xgb.n_rounds").sample_int(rng));
    c.xgb_max_depth = static_cast<int>(space.at("clf.xgb.max_depth").sample_int(rng));
    c.xgb_learning_rate = space.at("clf.xgb.learning_rate").sample_real(rng);
    c.xgb_gamma = space.at("clf.xgb.gamma").sample_real(rng);
    c.xgb_min_child_weight =
        static_cast<int>(space.at("clf.xgb.min_child_weight").sample_int(rng));
    c.xgb_subsample = space.at("clf.xgb.subsample").sample_real(rng);

    return c;
}

std::string to_string(ClassifierChoice c) {
    switch (c) {
        case ClassifierChoice::svm: return "svm";
        case ClassifierChoice::random_forest: return "random_forest";
        case ClassifierChoice::logistic_regression: return "logistic_regression";
        case ClassifierChoice::lda: return "lda";
        case ClassifierChoice::qda: return "qda";
        case ClassifierChoice::gaussian_nb: return "gaussian_nb";
        case ClassifierChoice::adaboost: return "adaboost";
        case ClassifierChoice::xgboost: return "xgboost";
    }
    return "?";
}

std::string WorkflowConfig::digest() const {
    std::ostringstream os;
    os << to_string(classifier);
    os << "|imp" << static_cast<int>(impute_method);
    if (relief_on) os << "|relief" << relief_n_features;
    if (sfm_on) os << "|sfm" << static_cast<int>(sfm_model);
    if (pca_on) os << "|pca" << static_cast<int>(pca_variant);
    if (univariate_on) os << "|univ";
    if (resample_on) os << "|rs" << static_cast<int>(resample_method);
    os << "|s" << std::hex << (rng_seed & 0xffffff);
    return os.str();
}

namespace {

using nlohmann::json;

json dist_to_json(const Distribution& d) {
    switch (d.kind) {
        case Distribution::Kind::bernoulli:
            return {{"kind", "bernoulli"}, {"p", d.p}};
        case Distribution::Kind::categorical:
            return {{"kind", "categorical"}, {"n", d.n_categories}};
        case Distribution::Kind::uniform:
            return {{"kind", "uniform"}, {"min", d.lo}, {"max", d.hi}};
        case Distribution::Kind::uniform_int:
            return {{"kind", "uniform_int"}, {"min", d.ilo}, {"max", d.ihi}};
        case Distribution::Kind::log_uniform:
            return {{"kind", "log_uniform"}, {"min", d.lo}, {"max", d.hi}};
    }
    return {};
}

Distribution dist_from_json(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "bernoulli") return Distribution::bernoulli(j.at("p"));
    if (kind == "categorical") return Distribution::categorical(j.at("n"));
    if (kind == "uniform") return Distribution::uniform(j.at("min"), j.at("max"));
    if (kind == "uniform_int")
        return Distribution::uniform_int(j.at("min"), j.at("max"));
    if (kind == "log_uniform")
        return Distribution::log_uniform(j.at("min"), j.at("max"));
    throw std::invalid_argument("unknown distribution kind: " + kind);
}

}  // namespace

std::string space_to_json(const SearchSpace& space) {
    json j;
    j["n_groups"] = space.n_groups;
    j["resampling_enabled"] = space.resampling_enabled;
    json dists = json::object();
    for (const auto& [name, d] : space.dists) dists[name] = dist_to_json(d);
    j["distributions"] = dists;
    json clf = json::array();
    for (auto c : space.classifier_options) clf.push_back(to_string(c));
    j["classifier_options"] = clf;
    json sfm = json::array();
    for (auto m : space.sfm_options) sfm.push_back(static_cast<int>(m));
    j["sfm_options"] = sfm;
    return j.dump(2);
}

SearchSpace space_from_json(const std::string& text) {
    const json j = json::parse(text);
    SearchSpace s = default_space(j.value("resampling_enabled", true),
                                  j.value("n_groups", std::size_t{17}));
    for (const auto& [name, dj] : j.at("distributions").items()) {
        if (!s.dists.count(name))
            throw std::invalid_argument("unknown hyperparameter: " + name);
        s.dists[name] = dist_from_json(dj);
    }
    if (j.contains("classifier_options")) {
        s.classifier_options.clear();
        for (const auto& name : j["classifier_options"]) {
            static const std::vector<ClassifierChoice> all = {
                ClassifierChoice::svm,        ClassifierChoice::random_forest,
                ClassifierChoice::logistic_regression, ClassifierChoice::lda,
                ClassifierChoice::qda,        ClassifierChoice::gaussian_nb,
                ClassifierChoice::adaboost,   ClassifierChoice::xgboost};
            bool found = false;
            for (auto c : all)
                if (to_string(c) == name.get<std::string>()) {
                    s.classifier_options.push_back(c);
                    found = true;
                }
            if (!found)
                throw std::invalid_argument("unknown classifier: " +
                                            name.get<std::string>());
        }
    }
    if (j.contains("sfm_options")) {
        s.sfm_options.clear();
        for (const auto& m : j["sfm_options"])
            s.sfm_options.push_back(static_cast<SfmModel>(m.get<int>()));
    }
    return s;
}

}  // namespace cashml
