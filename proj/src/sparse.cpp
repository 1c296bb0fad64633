#include "fracfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracfem {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::invalid_argument("SparseMatrix: triplet index out of range");
    }
    // stable sort keeps insertion order among duplicates, so the summation
    // order below is fixed by the caller's traversal order
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    std::size_t i = 0;
    while (i < triplets.size()) {
        const int r = triplets[i].row;
        const int c = triplets[i].col;
        double v = triplets[i].value;
        std::size_t j = i + 1;
        while (j < triplets.size() && triplets[j].row == r && triplets[j].col == c) {
            v += triplets[j].value;
            ++j;
        }
        m.col_idx_.push_back(c);
        m.values_.push_back(v);
        m.row_ptr_[static_cast<std::size_t>(r) + 1]++;
        i = j;
    }
    for (int r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
        throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
        y[r] = s;
    }
}

Vec SparseMatrix::multiply(std::span<const double> x) const {
    Vec y(rows_, 0.0);
    multiply(x, y);
    return y;
}

Vec SparseMatrix::diagonal() const {
    const int n = std::min(rows_, cols_);
    Vec d(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < n; ++r) {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            if (col_idx_[k] == r) d[r] = values_[k];
    }
    return d;
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<Triplet> trip;
    trip.reserve(values_.size());
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            trip.push_back({col_idx_[k], r, values_[k]});
    return from_triplets(cols_, rows_, std::move(trip));
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SparseMatrix::symmetry_defect() const {
    if (rows_ != cols_) throw std::invalid_argument("symmetry_defect: matrix not square");
    const SparseMatrix t = transposed();
    double defect = 0.0;
    for (int r = 0; r < rows_; ++r) {
        int ka = row_ptr_[r];
        int kb = t.row_ptr_[r];
        const int ea = row_ptr_[r + 1];
        const int eb = t.row_ptr_[r + 1];
        while (ka < ea || kb < eb) {
            const int ca = ka < ea ? col_idx_[ka] : cols_;
            const int cb = kb < eb ? t.col_idx_[kb] : cols_;
            if (ca == cb) {
                defect = std::max(defect, std::abs(values_[ka] - t.values_[kb]));
                ++ka, ++kb;
            } else if (ca < cb) {
                defect = std::max(defect, std::abs(values_[ka]));
                ++ka;
            } else {
                defect = std::max(defect, std::abs(t.values_[kb]));
                ++kb;
            }
        }
    }
    return defect;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && row_ptr_ == other.row_ptr_ &&
           col_idx_ == other.col_idx_;
}

void SparseMatrix::mark_symmetric(double rtol) {
    const double scale = max_abs();
    if (symmetry_defect() > rtol * (scale > 0.0 ? scale : 1.0))
        throw std::runtime_error("SparseMatrix: symmetric flag rejected by validation");
    symmetric_ = true;
}

std::vector<Vec> SparseMatrix::to_dense() const {
    std::vector<Vec> d(static_cast<std::size_t>(rows_), Vec(static_cast<std::size_t>(cols_), 0.0));
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d[r][col_idx_[k]] = values_[k];
    return d;
}

SparseMatrix SparseMatrix::linear_combination(std::span<const double> coeffs,
                                              std::span<const SparseMatrix* const> mats) {
    if (coeffs.size() != mats.size() || mats.empty())
        throw std::invalid_argument("linear_combination: bad term count");
    SparseMatrix out = *mats[0];
    out.symmetric_ = false;
    for (double& v : out.values_) v *= coeffs[0];
    for (std::size_t t = 1; t < mats.size(); ++t) {
        if (!out.same_pattern(*mats[t]))
            throw std::invalid_argument("linear_combination: sparsity patterns differ");
        const auto& vals = mats[t]->values_;
        for (std::size_t k = 0; k < vals.size(); ++k) out.values_[k] += coeffs[t] * vals[k];
    }
    return out;
}

}  // namespace fracfem
