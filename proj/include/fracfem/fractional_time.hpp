#ifndef FRACFEM_FRACTIONAL_TIME_HPP
#define FRACFEM_FRACTIONAL_TIME_HPP

#include <vector>

#include "fracfem/vec.hpp"

namespace fracfem {

/// Gamma function via a Lanczos approximation with reflection for x < 0.5.
/// Relative error is well below 1e-13 on (0, 3). Rejects x <= 0.
double gamma_function(double x);

/// Time partition t_n = T (n/N)^delta with step sizes tau_n = t_n - t_{n-1}.
struct GradedTimeMesh {
    double final_time = 1.0;
    int num_steps = 0;
    double grading = 1.0;  // delta >= 1
    std::vector<double> nodes;  // t_0 .. t_N
    std::vector<double> steps;  // tau_1 .. tau_N
};

GradedTimeMesh build_graded_mesh(double final_time, int num_steps, double grading);

/// Discrete L1 kernels k_{n,1..n} for one time level, with k_{n,0} = 0 by
/// convention. kernels[j-1] holds k_{n,j}.
struct L1KernelRow {
    int level = 0;
    std::vector<double> kernels;
};

/// Closed-form power-difference evaluation
///   k_{n,j} = [(t_n - t_{j-1})^{1-a} - (t_n - t_j)^{1-a}] / (tau_j Gamma(2-a)).
/// The subtraction cancels for j << n; both terms are O(t_n^{1-a}) and the
/// relative loss is bounded by tau_j/t_n, which is accepted at double
/// precision.
L1KernelRow l1_kernels(const GradedTimeMesh& mesh, double alpha, int level);

/// H^n = sum_{j=1}^{n} (k_{n,j} - k_{n,j-1}) U^{j-1}, so that the discrete
/// Caputo derivative of U^n is k_{n,n} U^n - H^n. history must hold exactly
/// n vectors U^0 .. U^{n-1} of equal dimension.
Vec caputo_history_sum(const L1KernelRow& kernels, std::span<const Vec> history);

/// Two-level extrapolation (1 + tau_n/tau_prev) u_prev - (tau_n/tau_prev) u_prev2.
Vec extrapolate(const Vec& u_prev, const Vec& u_prev2, double tau_n, double tau_prev);

}  // namespace fracfem

#endif
