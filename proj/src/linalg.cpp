#include "fracfem/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace fracfem {

namespace {

double true_residual(const LinearOperator& a, std::span<const double> x,
                     std::span<const double> b) {
    Vec r = a.apply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r);
}

}  // namespace

RankOneCorrected::RankOneCorrected(const SparseMatrix& base_matrix, Vec u, Vec v, double s)
    : base(&base_matrix), u_vec(std::move(u)), v_vec(std::move(v)), scale(s) {
    if (base->rows() != base->cols()) throw std::invalid_argument("RankOneCorrected: base not square");
    if (static_cast<int>(u_vec.size()) != base->rows() ||
        static_cast<int>(v_vec.size()) != base->rows())
        throw std::invalid_argument("RankOneCorrected: vector size mismatch");
}

void RankOneCorrected::apply(std::span<const double> x, std::span<double> y) const {
    base->multiply(x, y);
    const double vx = scale * dot(v_vec, x);
    axpy(vx, u_vec, y);
}

Vec cg_solve(const SparseMatrix& a, std::span<const double> b, double tol, int max_iter) {
    if (a.rows() != a.cols()) throw std::invalid_argument("cg_solve: matrix not square");
    const int n = a.rows();
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("cg_solve: rhs size mismatch");

    Vec x(b.size(), 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) return x;
    const double target = tol * bnorm;

    Vec inv_diag = a.diagonal();
    for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

    Vec r(b.begin(), b.end());
    Vec z(r.size());
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    Vec p = z;
    Vec ap(r.size());
    double rz = dot(r, z);

    for (int it = 1; it <= max_iter; ++it) {
        a.multiply(p, ap);
        const double pap = dot(p, ap);
        if (pap <= 0.0)
            throw SolveError("cg_solve: matrix not positive definite", norm2(r), it);
        const double alpha = rz / pap;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        if (norm2(r) <= target) {
            // recurrence residual can drift; accept only the recomputed one
            Vec rt = a.multiply(x);
            for (int i = 0; i < n; ++i) rt[i] = b[i] - rt[i];
            if (norm2(rt) <= target) return x;
            r = std::move(rt);
        }
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rz = rz_new;
    }
    throw SolveError("cg_solve: no convergence within max_iter", norm2(r) / bnorm, max_iter);
}

Vec bicgstab_solve(const LinearOperator& a, std::span<const double> b, double tol, int max_iter) {
    const int n = a.size();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("bicgstab_solve: rhs size mismatch");

    Vec x(b.size(), 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) return x;
    const double target = tol * bnorm;

    Vec r(b.begin(), b.end());
    Vec r0 = r;
    Vec p(r.size(), 0.0), v(r.size(), 0.0), s(r.size()), t(r.size());
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    const double breakdown = 1e-300;

    auto restart = [&]() {
        const Vec ax = a.apply(x);
        for (int i = 0; i < n; ++i) r[i] = b[i] - ax[i];
        r0 = r;
        rho = alpha = omega = 1.0;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
    };

    for (int it = 1; it <= max_iter; ++it) {
        const double rho_new = dot(r0, r);
        if (std::abs(rho_new) < breakdown)
            throw SolveError("bicgstab_solve: rho breakdown", norm2(r) / bnorm, it);
        const double beta = (rho_new / rho) * (alpha / omega);
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        a.apply(p, v);
        const double r0v = dot(r0, v);
        if (std::abs(r0v) < breakdown)
            throw SolveError("bicgstab_solve: r0.v breakdown", norm2(r) / bnorm, it);
        alpha = rho_new / r0v;
        for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (norm2(s) <= target) {
            axpy(alpha, p, x);
            if (true_residual(a, x, b) <= target) return x;
            restart();
            continue;
        }
        a.apply(s, t);
        const double tt = dot(t, t);
        if (tt < breakdown)
            throw SolveError("bicgstab_solve: t.t breakdown", norm2(s) / bnorm, it);
        omega = dot(t, s) / tt;
        if (std::abs(omega) < breakdown)
            throw SolveError("bicgstab_solve: omega breakdown", norm2(s) / bnorm, it);
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        rho = rho_new;
        if (norm2(r) <= target) {
            if (true_residual(a, x, b) <= target) return x;
            restart();
        }
    }
    throw SolveError("bicgstab_solve: no convergence within max_iter",
                     true_residual(a, x, b) / bnorm, max_iter);
}

Vec lu_solve_dense(const LinearOperator& a, std::span<const double> b) {
    const int n = a.size();
    if (n > 2000) throw std::invalid_argument("lu_solve_dense: dimension above fallback limit");
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("lu_solve_dense: rhs size mismatch");

    // densify column by column
    std::vector<Vec> m(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
    Vec e(static_cast<std::size_t>(n), 0.0), col(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        a.apply(e, col);
        e[j] = 0.0;
        for (int i = 0; i < n; ++i) m[i][j] = col[i];
    }

    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
        if (m[piv][k] == 0.0) throw SolveError("lu_solve_dense: singular matrix", 0.0, 0);
        std::swap(m[k], m[piv]);
        std::swap(perm[k], perm[piv]);
        for (int i = k + 1; i < n; ++i) {
            const double f = m[i][k] / m[k][k];
            m[i][k] = f;
            for (int j = k + 1; j < n; ++j) m[i][j] -= f * m[k][j];
        }
    }
    Vec x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= m[i][j] * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= m[i][j] * x[j];
        x[i] /= m[i][i];
    }
    return x;
}

Vec solve_nonsymmetric(const LinearOperator& a, std::span<const double> b, double tol,
                       int max_iter) {
    try {
        return bicgstab_solve(a, b, tol, max_iter);
    } catch (const SolveError&) {
        if (a.size() > 2000) throw;
        return lu_solve_dense(a, b);
    }
}

Vec sherman_morrison_solve(const std::function<Vec(std::span<const double>)>& base_solve,
                           std::span<const double> u, std::span<const double> v, double scale,
                           std::span<const double> b) {
    Vec x = base_solve(b);
    if (scale == 0.0) return x;
    const Vec y = base_solve(u);
    const double denom = 1.0 + scale * dot(v, y);
    if (std::abs(denom) < 1e-14)
        throw SolveError("sherman_morrison_solve: singular rank-one correction", std::abs(denom),
                         0);
    const double factor = scale * dot(v, x) / denom;
    axpy(-factor, y, x);
    return x;
}

}  // namespace fracfem
