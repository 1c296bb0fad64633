#ifndef FRACFEM_SPARSE_HPP
#define FRACFEM_SPARSE_HPP

#include <span>
#include <vector>

#include "fracfem/vec.hpp"

namespace fracfem {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed-row real matrix. Column indices are strictly increasing
/// within each row; structural zeros are allowed.
class SparseMatrix {
  public:
    SparseMatrix() = default;
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(values_.size()); }

    std::span<const int> row_offsets() const { return row_ptr_; }
    std::span<const int> col_indices() const { return col_idx_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values_mut() { return values_; }

    void multiply(std::span<const double> x, std::span<double> y) const;
    Vec multiply(std::span<const double> x) const;

    Vec diagonal() const;
    SparseMatrix transposed() const;
    double max_abs() const;
    // max |A - A^T| over all entries
    double symmetry_defect() const;
    bool same_pattern(const SparseMatrix& other) const;

    bool symmetric() const { return symmetric_; }
    // sets the symmetric flag after validating |A - A^T|_max <= rtol * |A|_max
    void mark_symmetric(double rtol = 1e-12);

    std::vector<Vec> to_dense() const;

    /// coeffs[0]*mats[0] + coeffs[1]*mats[1] + ...; all matrices must share
    /// one sparsity pattern.
    static SparseMatrix linear_combination(std::span<const double> coeffs,
                                           std::span<const SparseMatrix* const> mats);

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
    bool symmetric_ = false;
};

}  // namespace fracfem

#endif
