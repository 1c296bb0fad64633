#ifndef FRACFEM_LINALG_HPP
#define FRACFEM_LINALG_HPP

#include <functional>
#include <stdexcept>
#include <string>

#include "fracfem/sparse.hpp"
#include "fracfem/vec.hpp"

namespace fracfem {

class SolveError : public std::runtime_error {
  public:
    SolveError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

  private:
    double residual_;
    int iterations_;
};

struct LinearOperator {
    virtual ~LinearOperator() = default;
    virtual int size() const = 0;
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    Vec apply(std::span<const double> x) const {
        Vec y(static_cast<std::size_t>(size()), 0.0);
        apply(x, y);
        return y;
    }
};

struct SparseOperator final : LinearOperator {
    explicit SparseOperator(const SparseMatrix& m) : matrix(&m) {}
    const SparseMatrix* matrix;
    using LinearOperator::apply;
    int size() const override { return matrix->rows(); }
    void apply(std::span<const double> x, std::span<double> y) const override {
        matrix->multiply(x, y);
    }
};

/// base + scale * u v^T, applied matrix-free.
struct RankOneCorrected final : LinearOperator {
    RankOneCorrected(const SparseMatrix& base_matrix, Vec u, Vec v, double s);
    const SparseMatrix* base;
    Vec u_vec;
    Vec v_vec;
    double scale;
    using LinearOperator::apply;
    int size() const override { return base->rows(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems; the returned
/// vector always satisfies ||A x - b|| <= tol * ||b|| (recomputed residual).
Vec cg_solve(const SparseMatrix& a, std::span<const double> b, double tol = 1e-11,
             int max_iter = 5000);

Vec bicgstab_solve(const LinearOperator& a, std::span<const double> b, double tol = 1e-11,
                   int max_iter = 5000);

/// Dense partial-pivot LU on a densified operator; intended as the small
/// fallback path (dimension <= 2000).
Vec lu_solve_dense(const LinearOperator& a, std::span<const double> b);

/// BiCGStab with dense LU fallback on breakdown/non-convergence.
Vec solve_nonsymmetric(const LinearOperator& a, std::span<const double> b, double tol = 1e-11,
                       int max_iter = 5000);

/// Solves (base + scale * u v^T) x = b from two base solves.
Vec sherman_morrison_solve(const std::function<Vec(std::span<const double>)>& base_solve,
                           std::span<const double> u, std::span<const double> v, double scale,
                           std::span<const double> b);

}  // namespace fracfem

#endif
