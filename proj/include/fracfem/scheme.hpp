#ifndef FRACFEM_SCHEME_HPP
#define FRACFEM_SCHEME_HPP

#include <vector>

#include "fracfem/assembly.hpp"
#include "fracfem/fractional_time.hpp"
#include "fracfem/linalg.hpp"
#include "fracfem/problems.hpp"

namespace fracfem {

struct RunOptions {
    double newton_tol = 1e-7;  // paper stopping criterion for the first step
    int newton_max_iter = 50;
    double linear_tol = 1e-11;
    int linear_max_iter = 5000;
};

/// Fully assembled discrete problem: space/time meshes, operators, forcing
/// loads for the separable forcing parts, and Ritz-projected initial data.
/// Immutable after construction; one instance may serve concurrent runs.
struct DiscreteProblem {
    P1Space space;
    GradedTimeMesh time_mesh;
    double alpha = 0.5;
    KirchhoffFn m_fn;
    MemoryCoefficient memory;

    SparseMatrix mass;
    SparseMatrix stiffness;
    std::vector<SparseMatrix> memory_factors;  // spatial factor per term

    struct ForcingLoad {
        TimeFactor time_coeff;
        Vec load;
    };
    std::vector<ForcingLoad> forcing_loads;

    Vec u0;  // Ritz projection of the initial data
    // cached phi_k(t_n), psi_k(t_n) per term over all nodes
    std::vector<Vec> phi_at_node;
    std::vector<Vec> psi_at_node;
    double m_lower_bound = 0.0;

    Vec forcing_vector(double t) const;
};

DiscreteProblem discretize(const ProblemSpec& spec, int grid, int steps, double grading);
DiscreteProblem discretize(const ProblemSpec& spec, P1Space space, int steps, double grading);

struct SolveTrace {
    std::vector<Vec> solutions;                // U^0 .. U^N
    std::vector<std::vector<Vec>> memory_products;  // [term][level] = B_k U^level
    int newton_iterations = 0;
    // [1] = final Newton residual norm, [n>=2] = relative linear residual
    Vec step_residuals;
};

struct NewtonReport {
    int iterations = 0;
    double residual = 0.0;
};

/// Solves the nonlinear first-step system by Newton iteration with the
/// rank-one-corrected Jacobian, initial guess U^0.
Vec first_step_newton(const DiscreteProblem& problem, double tol = 1e-7, int max_iter = 50,
                      double linear_tol = 1e-11, NewtonReport* report = nullptr);

/// Collapsed node weights of the memory quadrature at level n: weight of
/// B(t_n, t_j) U^j for j = 1..n-1. They sum to t_n - t_1.
Vec memory_weights(const GradedTimeMesh& mesh, int level);

/// Q^n from the cached separable products; O(n * dim) per call.
Vec memory_rhs(const DiscreteProblem& problem, const SolveTrace& trace, int level);

/// One linearized step (level >= 2): SPD solve of
/// (k_{n,n} Mass + M(||grad u~||^2) K) U^n = F^n + Mass H^n + Q^n.
Vec linearized_step(const DiscreteProblem& problem, const SolveTrace& trace, int level,
                    const RunOptions& options = {}, double* relative_residual = nullptr);

SolveTrace run(const DiscreteProblem& problem, const RunOptions& options = {});

/// ||U||_Mass + tau_n^{alpha/2} ||U||_K, the weighted H1 norm at level n.
double weighted_norm(const DiscreteProblem& problem, std::span<const double> u, int level);

}  // namespace fracfem

#endif
