#include "fracfem/fractional_time.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracfem {

double gamma_function(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("gamma_function: requires x > 0");
    // Lanczos, g = 7, 9 coefficients
    static constexpr double coeff[9] = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_function(1.0 - x));
    }
    const double z = x - 1.0;
    double sum = coeff[0];
    for (int i = 1; i < 9; ++i) sum += coeff[i] / (z + i);
    const double base = z + 7.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(base, z + 0.5) * std::exp(-base) * sum;
}

GradedTimeMesh build_graded_mesh(double final_time, int num_steps, double grading) {
    if (!(final_time > 0.0)) throw std::invalid_argument("build_graded_mesh: requires T > 0");
    if (num_steps < 1) throw std::invalid_argument("build_graded_mesh: requires N >= 1");
    if (!(grading >= 1.0)) throw std::invalid_argument("build_graded_mesh: requires delta >= 1");

    GradedTimeMesh mesh;
    mesh.final_time = final_time;
    mesh.num_steps = num_steps;
    mesh.grading = grading;
    mesh.nodes.resize(static_cast<std::size_t>(num_steps) + 1);
    mesh.steps.resize(static_cast<std::size_t>(num_steps));
    for (int n = 0; n <= num_steps; ++n)
        mesh.nodes[n] = final_time * std::pow(static_cast<double>(n) / num_steps, grading);
    for (int n = 1; n <= num_steps; ++n) {
        mesh.steps[n - 1] = mesh.nodes[n] - mesh.nodes[n - 1];
        if (!(mesh.steps[n - 1] > 0.0))
            throw std::invalid_argument("build_graded_mesh: nodes not strictly increasing");
    }
    return mesh;
}

L1KernelRow l1_kernels(const GradedTimeMesh& mesh, double alpha, int level) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("l1_kernels: requires alpha in (0,1)");
    if (level < 1 || level > mesh.num_steps)
        throw std::invalid_argument("l1_kernels: level out of range");

    const double p = 1.0 - alpha;
    const double inv_gamma2ma = 1.0 / gamma_function(2.0 - alpha);
    const double tn = mesh.nodes[level];

    L1KernelRow row;
    row.level = level;
    row.kernels.resize(static_cast<std::size_t>(level));
    for (int j = 1; j <= level; ++j) {
        const double a = std::pow(tn - mesh.nodes[j - 1], p);
        const double b = j == level ? 0.0 : std::pow(tn - mesh.nodes[j], p);
        row.kernels[j - 1] = (a - b) / mesh.steps[j - 1] * inv_gamma2ma;
    }
    return row;
}

Vec caputo_history_sum(const L1KernelRow& kernels, std::span<const Vec> history) {
    const int n = kernels.level;
    if (static_cast<int>(history.size()) != n)
        throw std::invalid_argument("caputo_history_sum: history must hold exactly n vectors");
    const std::size_t dim = history.empty() ? 0 : history[0].size();
    for (const Vec& u : history)
        if (u.size() != dim)
            throw std::invalid_argument("caputo_history_sum: history dimension mismatch");

    Vec h(dim, 0.0);
    for (int j = 1; j <= n; ++j) {
        const double w = kernels.kernels[j - 1] - (j >= 2 ? kernels.kernels[j - 2] : 0.0);
        axpy(w, history[j - 1], h);
    }
    return h;
}

Vec extrapolate(const Vec& u_prev, const Vec& u_prev2, double tau_n, double tau_prev) {
    if (!(tau_prev > 0.0)) throw std::invalid_argument("extrapolate: requires tau_prev > 0");
    if (u_prev.size() != u_prev2.size())
        throw std::invalid_argument("extrapolate: dimension mismatch");
    const double r = tau_n / tau_prev;
    Vec out(u_prev.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (1.0 + r) * u_prev[i] - r * u_prev2[i];
    return out;
}

}  // namespace fracfem
