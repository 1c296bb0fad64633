#include "fracfem/scheme.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracfem {

namespace {

SparseMatrix memory_matrix_at(const DiscreteProblem& p, int level_t, int level_s) {
    std::vector<double> coeffs;
    std::vector<const SparseMatrix*> mats;
    for (std::size_t k = 0; k < p.memory_factors.size(); ++k) {
        coeffs.push_back(p.phi_at_node[k][level_t] * p.psi_at_node[k][level_s]);
        mats.push_back(&p.memory_factors[k]);
    }
    return SparseMatrix::linear_combination(coeffs, mats);
}

void check_step_finite(const Vec& u) {
    if (!all_finite(u)) throw std::runtime_error("non-finite solution values");
}

}  // namespace

Vec DiscreteProblem::forcing_vector(double t) const {
    Vec f(static_cast<std::size_t>(space.n_dofs), 0.0);
    for (const ForcingLoad& part : forcing_loads) axpy(part.time_coeff(t), part.load, f);
    return f;
}

DiscreteProblem discretize(const ProblemSpec& spec, int grid, int steps, double grading) {
    return discretize(spec, build_p1_space(grid), steps, grading);
}

DiscreteProblem discretize(const ProblemSpec& spec, P1Space space, int steps, double grading) {
    DiscreteProblem p;
    p.space = std::move(space);
    p.time_mesh = build_graded_mesh(spec.final_time, steps, grading);
    p.alpha = spec.alpha;
    p.m_fn = spec.m_fn;
    p.memory = spec.memory;

    validate_memory_coefficient(p.memory);
    p.mass = assemble_mass(p.space);
    p.stiffness = assemble_stiffness(p.space);
    for (const MemoryTerm& term : p.memory.terms)
        p.memory_factors.push_back(assemble_memory_matrix(p.space, term));

    for (const auto& part : spec.forcing_parts)
        p.forcing_loads.push_back({part.time_coeff, assemble_load(p.space, part.space)});

    p.u0 = ritz_projection(p.space, spec.u0_field, spec.u0_grad);

    p.phi_at_node.resize(p.memory.terms.size());
    p.psi_at_node.resize(p.memory.terms.size());
    for (std::size_t k = 0; k < p.memory.terms.size(); ++k) {
        p.phi_at_node[k].resize(p.time_mesh.nodes.size());
        p.psi_at_node[k].resize(p.time_mesh.nodes.size());
        for (std::size_t n = 0; n < p.time_mesh.nodes.size(); ++n) {
            p.phi_at_node[k][n] = p.memory.terms[k].phi(p.time_mesh.nodes[n]);
            p.psi_at_node[k][n] = p.memory.terms[k].psi(p.time_mesh.nodes[n]);
        }
    }

    // assumption (A2): M bounded below by a positive constant
    p.m_lower_bound = p.m_fn.value(0.0);
    for (int i = 0; i <= 200; ++i) {
        const double s = 0.5 * i;
        p.m_lower_bound = std::min(p.m_lower_bound, p.m_fn.value(s));
    }
    if (!(p.m_lower_bound > 0.0))
        throw std::invalid_argument("discretize: M(s) not positive on sampled range");
    return p;
}

Vec first_step_newton(const DiscreteProblem& problem, double tol, int max_iter, double linear_tol,
                      NewtonReport* report) {
    const GradedTimeMesh& mesh = problem.time_mesh;
    const double t1 = mesh.nodes[1];
    const double tau1 = mesh.steps[0];
    const double k11 = l1_kernels(mesh, problem.alpha, 1).kernels[0];
    const Vec f1 = problem.forcing_vector(t1);
    const SparseMatrix* b11 = nullptr;
    SparseMatrix b11_storage;
    if (!problem.memory_factors.empty()) {
        b11_storage = memory_matrix_at(problem, 1, 1);
        b11 = &b11_storage;
    }

    const SparseMatrix& mass = problem.mass;
    const SparseMatrix& stiff = problem.stiffness;
    const Vec& u0 = problem.u0;

    Vec u = u0;
    Vec residual(u.size());
    for (int it = 0; it <= max_iter; ++it) {
        const Vec ku = stiff.multiply(u);
        const double s = dot(u, ku);
        const double m_val = problem.m_fn.value(s);
        const double m_der = problem.m_fn.derivative(s);
        if (!(m_val > 0.0))
            throw std::runtime_error("first_step_newton: Kirchhoff coefficient not positive");

        // R(U) = k11 Mass (U - U0) + M(s) K U - tau1 B(t1,t1) U - F1
        Vec diff(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) diff[i] = u[i] - u0[i];
        residual = mass.multiply(diff);
        scale(k11, residual);
        axpy(m_val, ku, residual);
        if (b11) axpy(-tau1, b11->multiply(u), residual);
        axpy(-1.0, f1, residual);

        const double rnorm = norm2(residual);
        if (rnorm <= tol) {
            if (report) *report = {it, rnorm};
            return u;
        }
        if (it == max_iter) break;

        std::vector<double> coeffs = {k11, m_val};
        std::vector<const SparseMatrix*> mats = {&mass, &stiff};
        if (b11) {
            coeffs.push_back(-tau1);
            mats.push_back(b11);
        }
        const SparseMatrix base = SparseMatrix::linear_combination(coeffs, mats);
        const SparseOperator base_op(base);
        const auto base_solve = [&](std::span<const double> rhs) {
            return solve_nonsymmetric(base_op, rhs, linear_tol);
        };
        Vec neg_r = residual;
        scale(-1.0, neg_r);
        const Vec delta = sherman_morrison_solve(base_solve, ku, ku, 2.0 * m_der, neg_r);
        axpy(1.0, delta, u);
    }
    throw SolveError("first_step_newton: no convergence within max_iter", norm2(residual),
                     max_iter);
}

Vec memory_weights(const GradedTimeMesh& mesh, int level) {
    if (level < 1 || level > mesh.num_steps)
        throw std::invalid_argument("memory_weights: level out of range");
    // composite trapezoid on [t_1, t_{n-1}] plus left rectangle on [t_{n-1}, t_n]
    Vec w(static_cast<std::size_t>(level - 1), 0.0);
    for (int j = 1; j <= level - 2; ++j) {
        w[j - 1] += 0.5 * mesh.steps[j];  // tau_{j+1}/2
        w[j] += 0.5 * mesh.steps[j];
    }
    if (level >= 2) w[level - 2] += mesh.steps[level - 1];  // tau_n
    return w;
}

Vec memory_rhs(const DiscreteProblem& problem, const SolveTrace& trace, int level) {
    const std::size_t dim = problem.u0.size();
    Vec q(dim, 0.0);
    if (level < 2 || problem.memory_factors.empty()) return q;
    for (std::size_t k = 0; k < problem.memory_factors.size(); ++k) {
        if (trace.memory_products[k].size() < static_cast<std::size_t>(level))
            throw std::invalid_argument("memory_rhs: product cache missing levels");
    }

    const Vec w = memory_weights(problem.time_mesh, level);
    for (std::size_t k = 0; k < problem.memory_factors.size(); ++k) {
        Vec acc(dim, 0.0);
        for (int j = 1; j <= level - 1; ++j)
            axpy(w[j - 1] * problem.psi_at_node[k][j], trace.memory_products[k][j], acc);
        axpy(problem.phi_at_node[k][level], acc, q);
    }
    return q;
}

Vec linearized_step(const DiscreteProblem& problem, const SolveTrace& trace, int level,
                    const RunOptions& options, double* relative_residual) {
    if (level < 2) throw std::invalid_argument("linearized_step: requires level >= 2");
    if (trace.solutions.size() < static_cast<std::size_t>(level))
        throw std::invalid_argument("linearized_step: history incomplete");

    const GradedTimeMesh& mesh = problem.time_mesh;
    const L1KernelRow row = l1_kernels(mesh, problem.alpha, level);
    const double knn = row.kernels.back();
    const Vec history_sum = caputo_history_sum(
        row, std::span<const Vec>(trace.solutions.data(), static_cast<std::size_t>(level)));

    const Vec linearized = extrapolate(trace.solutions[level - 1], trace.solutions[level - 2],
                                       mesh.steps[level - 1], mesh.steps[level - 2]);
    const double m_val = problem.m_fn.value(grad_norm_sq(linearized, problem.stiffness));
    if (!(m_val > 0.0))
        throw std::runtime_error("linearized_step: Kirchhoff coefficient not positive");

    const double coeffs[2] = {knn, m_val};
    const SparseMatrix* mats[2] = {&problem.mass, &problem.stiffness};
    SparseMatrix system = SparseMatrix::linear_combination(coeffs, mats);
    system.mark_symmetric();

    Vec rhs = problem.forcing_vector(mesh.nodes[level]);
    axpy(1.0, problem.mass.multiply(history_sum), rhs);
    axpy(1.0, memory_rhs(problem, trace, level), rhs);

    Vec u = cg_solve(system, rhs, options.linear_tol, options.linear_max_iter);
    if (relative_residual) {
        const double rhs_norm = norm2(rhs);
        Vec res = system.multiply(u);
        for (std::size_t i = 0; i < res.size(); ++i) res[i] = rhs[i] - res[i];
        *relative_residual = rhs_norm > 0.0 ? norm2(res) / rhs_norm : 0.0;
    }
    return u;
}

SolveTrace run(const DiscreteProblem& problem, const RunOptions& options) {
    const int n_steps = problem.time_mesh.num_steps;
    SolveTrace trace;
    trace.solutions.reserve(static_cast<std::size_t>(n_steps) + 1);
    trace.memory_products.resize(problem.memory_factors.size());
    trace.step_residuals.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);

    const auto push_level = [&](Vec u) {
        for (std::size_t k = 0; k < problem.memory_factors.size(); ++k)
            trace.memory_products[k].push_back(problem.memory_factors[k].multiply(u));
        trace.solutions.push_back(std::move(u));
    };

    push_level(problem.u0);

    try {
        NewtonReport report;
        Vec u1 = first_step_newton(problem, options.newton_tol, options.newton_max_iter,
                                   options.linear_tol, &report);
        check_step_finite(u1);
        trace.newton_iterations = report.iterations;
        trace.step_residuals[1] = report.residual;
        push_level(std::move(u1));
    } catch (const std::exception& e) {
        throw std::runtime_error("time level 1: " + std::string(e.what()));
    }

    for (int n = 2; n <= n_steps; ++n) {
        try {
            double rel = 0.0;
            Vec u = linearized_step(problem, trace, n, options, &rel);
            check_step_finite(u);
            trace.step_residuals[n] = rel;
            push_level(std::move(u));
        } catch (const std::exception& e) {
            throw std::runtime_error("time level " + std::to_string(n) + ": " +
                                     std::string(e.what()));
        }
    }
    return trace;
}

double weighted_norm(const DiscreteProblem& problem, std::span<const double> u, int level) {
    const double mass_part = std::sqrt(std::max(0.0, dot(u, problem.mass.multiply(u))));
    if (level == 0) return mass_part;
    if (level < 1 || level > problem.time_mesh.num_steps)
        throw std::invalid_argument("weighted_norm: level out of range");
    const double tau = problem.time_mesh.steps[level - 1];
    return mass_part +
           std::pow(tau, 0.5 * problem.alpha) * std::sqrt(grad_norm_sq(u, problem.stiffness));
}

}  // namespace fracfem
