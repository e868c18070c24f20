#include "cashml/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cashml/rng.hpp"

namespace cashml {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool is_missing_token(const std::string& cell) {
    const std::string t = lower(trim(cell));
    return t.empty() || t == "nan";
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void FeatureDataset::validate() const {
    if (values.rows() != sample_ids.size())
        throw LoadError("row count does not match sample id count");
    if (values.cols() != feature_names.size())
        throw LoadError("column count does not match feature name count");
    if (labels.size() != values.rows())
        throw LoadError("label count does not match sample count");
    if (group_tags.size() != values.cols())
        throw LoadError("group tag count does not match feature count");
    int n0 = 0, n1 = 0;
    for (int y : labels) (y == 0 ? n0 : n1)++;
    if (n0 == 0 || n1 == 0) throw LoadError("both classes must be present");
    std::set<std::string> ids(sample_ids.begin(), sample_ids.end());
    if (ids.size() != sample_ids.size()) throw LoadError("duplicate sample ids");
    std::set<std::string> names(feature_names.begin(), feature_names.end());
    if (names.size() != feature_names.size())
        throw LoadError("duplicate feature names");
}

FeatureDataset FeatureDataset::subset(const std::vector<std::size_t>& row_idx) const {
    FeatureDataset out;
    out.feature_names = feature_names;
    out.group_tags = group_tags;
    out.class0_name = class0_name;
    out.class1_name = class1_name;
    out.values = values.select_rows(row_idx);
    out.sample_ids.reserve(row_idx.size());
    out.labels.reserve(row_idx.size());
    for (std::size_t i : row_idx) {
        out.sample_ids.push_back(sample_ids[i]);
        out.labels.push_back(labels[i]);
    }
    return out;
}

std::vector<std::string> FeatureDataset::distinct_groups() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& g : group_tags)
        if (seen.insert(g).second) out.push_back(g);
    return out;
}

FeatureDataset load_csv(const std::string& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw LoadError("empty file: " + path);
    const std::vector<std::string> header = split_line(line);
    if (header.size() < 3)
        throw LoadError("need at least id, one feature, and label columns");

    std::size_t label_col = header.size();
    for (std::size_t j = 1; j < header.size(); ++j)
        if (trim(header[j]) == opts.label_column) label_col = j;
    if (label_col == header.size())
        throw LoadError("label column not found: " + opts.label_column);

    FeatureDataset d;
    for (std::size_t j = 1; j < header.size(); ++j)
        if (j != label_col) d.feature_names.push_back(trim(header[j]));

    std::vector<std::string> raw_labels;
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw LoadError("row " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        d.sample_ids.push_back(trim(cells[0]));
        std::vector<double> row;
        for (std::size_t j = 1; j < cells.size(); ++j) {
            if (j == label_col) {
                raw_labels.push_back(trim(cells[j]));
                continue;
            }
            if (is_missing_token(cells[j])) {
                row.push_back(missing_marker());
                continue;
            }
            try {
                row.push_back(std::stod(trim(cells[j])));
            } catch (const std::exception&) {
                throw LoadError("row " + std::to_string(lineno) + ", column '" +
                                trim(header[j]) + "': not a number: " + cells[j]);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw LoadError("no data rows in " + path);

    d.values = Matrix(rows.size(), d.feature_names.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < d.feature_names.size(); ++j)
            d.values(i, j) = rows[i][j];

    std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
    if (distinct.size() != 2)
        throw LoadError("non-binary labels: found " +
                        std::to_string(distinct.size()) + " distinct values");
    // Lexicographically smaller value -> class 0, unless overridden.
    std::string c0 = *distinct.begin(), c1 = *std::next(distinct.begin());
    if (opts.positive_class) {
        if (*opts.positive_class == c0) std::swap(c0, c1);
        else if (*opts.positive_class != c1)
            throw LoadError("positive class '" + *opts.positive_class +
                            "' not among label values");
    }
    d.class0_name = c0;
    d.class1_name = c1;
    for (const auto& s : raw_labels) d.labels.push_back(s == c1 ? 1 : 0);

    d.group_tags.assign(d.feature_names.size(), opts.default_group);
    if (opts.groups_path) {
        std::ifstream gin(*opts.groups_path);
        if (!gin) throw LoadError("cannot open groups file: " + *opts.groups_path);
        std::map<std::string, std::string> tag_of;
        std::string gline;
        while (std::getline(gin, gline)) {
            if (trim(gline).empty()) continue;
            const auto cells = split_line(gline);
            if (cells.size() != 2)
                throw LoadError("groups file: expected 2 columns per row");
            tag_of[trim(cells[0])] = trim(cells[1]);
        }
        for (std::size_t j = 0; j < d.feature_names.size(); ++j) {
            auto it = tag_of.find(d.feature_names[j]);
            if (it != tag_of.end()) d.group_tags[j] = it->second;
        }
    }

    d.validate();
    return d;
}

void write_csv(const FeatureDataset& d, const std::string& path,
               const std::string& label_column) {
    std::ofstream out(path);
    out << "id";
    for (const auto& f : d.feature_names) out << ',' << f;
    out << ',' << label_column << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        out << d.sample_ids[i];
        for (std::size_t j = 0; j < d.n_features(); ++j) {
            out << ',';
            if (!is_missing(d.values(i, j))) out << d.values(i, j);
        }
        out << ',' << (d.labels[i] == 1 ? d.class1_name : d.class0_name) << '\n';
    }
}

void write_groups_csv(const FeatureDataset& d, const std::string& path) {
    std::ofstream out(path);
    for (std::size_t j = 0; j < d.n_features(); ++j)
        out << d.feature_names[j] << ',' << d.group_tags[j] << '\n';
}

SplitPlan stratified_split(const FeatureDataset& d, double test_fraction,
                           std::uint64_t seed) {
    std::vector<std::size_t> class_idx[2];
    for (std::size_t i = 0; i < d.n_samples(); ++i)
        class_idx[d.labels[i]].push_back(i);
    if (class_idx[0].size() < 2 || class_idx[1].size() < 2)
        throw std::invalid_argument("cannot stratify: a class has fewer than 2 samples");

    SplitPlan plan;
    plan.seed = seed;
    Rng rng(derive_seed(seed, 0x51e715, 17));
    for (int c = 0; c < 2; ++c) {
        auto& idx = class_idx[c];
        // Fisher-Yates with our deterministic rng
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
        // round-half-up, then repair to keep >=1 per class on both sides
        std::size_t n_test = static_cast<std::size_t>(
            std::floor(static_cast<double>(idx.size()) * test_fraction + 0.5));
        n_test = std::max<std::size_t>(1, std::min(n_test, idx.size() - 1));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_test ? plan.test_indices : plan.train_indices).push_back(idx[i]);
    }
    std::sort(plan.train_indices.begin(), plan.train_indices.end());
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    return plan;
}

}  // namespace cashml
