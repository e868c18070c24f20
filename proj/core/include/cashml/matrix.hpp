#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace cashml {

// Dense row-major matrix of doubles. Missing values are NaN.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    Matrix select_rows(const std::vector<std::size_t>& idx) const {
        Matrix out(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(idx[i], j);
        return out;
    }

    Matrix select_cols(const std::vector<std::size_t>& idx) const {
        Matrix out(rows_, idx.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = (*this)(i, idx[j]);
        return out;
    }

    bool operator==(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (std::size_t k = 0; k < data_.size(); ++k) {
            const bool an = std::isnan(data_[k]), bn = std::isnan(o.data_[k]);
            if (an != bn) return false;
            if (!an && data_[k] != o.data_[k]) return false;
        }
        return true;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline bool is_missing(double v) { return std::isnan(v); }
inline double missing_marker() { return std::nan(""); }

}  // namespace cashml
