#ifndef FRACFEM_PROBLEMS_HPP
#define FRACFEM_PROBLEMS_HPP

#include <functional>
#include <string>
#include <vector>

#include "fracfem/assembly.hpp"

namespace fracfem {

/// Kirchhoff coefficient M(s) with its analytic derivative.
struct KirchhoffFn {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

using SpaceTimeField = std::function<double(double, double, double)>;  // (x, y, t)
using SpaceTimeGrad = std::function<std::array<double, 2>(double, double, double)>;

/// Manufactured problem: exact solution time_factor(t) * spatial_profile(x,y)
/// with homogeneous Dirichlet data, plus the forcing derived from the PDE.
struct ProblemSpec {
    std::string id;
    double alpha = 0.5;
    double final_time = 1.0;

    KirchhoffFn m_fn;
    MemoryCoefficient memory;

    TimeFactor time_factor;  // t^alpha
    ScalarField spatial_profile;
    VectorField spatial_profile_grad;
    ScalarField spatial_laplacian;
    /// Spatial image of the profile under the memory operator,
    /// -div(c2 grad w) + div(c1 w) + c0 w (zero field when no memory).
    ScalarField memory_image;
    /// phi(t) * integral_0^t psi(s) s^alpha ds.
    TimeFactor memory_time_integral;
    /// C with ||grad u(t)||^2 = C t^{2 alpha}.
    double energy_constant = 0.0;

    SpaceTimeField exact;
    SpaceTimeGrad exact_grad;
    ScalarField u0_field;
    VectorField u0_grad;

    SpaceTimeField forcing;
    struct ForcingPart {
        TimeFactor time_coeff;
        ScalarField space;
    };
    std::vector<ForcingPart> forcing_parts;
};

/// u = t^a (x-1)(y-1) sin(pi x) sin(pi y), M(s) = 1 + s, memory b2 = I.
ProblemSpec example_51(double alpha);

/// u = t^a (x - x^2)(y - y^2), M(s) = 1 + s, variable-coefficient memory
/// with factor (1+t)(1+s).
ProblemSpec example_52(double alpha);

/// ids: "kirchhoff-sin" and "kirchhoff-poly"
ProblemSpec problem_by_id(const std::string& id, double alpha);

/// Caputo(u) - M(||grad u||^2) Lap(u) - memory integral - f, all from closed
/// forms, at one point. Near zero for a consistent spec.
double pde_residual(const ProblemSpec& spec, double x, double y, double t);

}  // namespace fracfem

#endif
