#include "fracfem/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracfem/fractional_time.hpp"
#include "fracfem/quadrature.hpp"

namespace fracfem {

namespace {

constexpr double kPi = std::numbers::pi;

/// integral of |grad w|^2 over the unit square, composite degree-9 rule
double energy_by_quadrature(const VectorField& profile_grad, int subdivisions) {
    const TriMesh mesh = build_unit_square_mesh(subdivisions);
    double total = 0.0;
    for (std::size_t tri = 0; tri < mesh.triangles.size(); ++tri) {
        const auto& t = mesh.triangles[tri];
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        const P1Gradients g = p1_basis_gradients(mesh, static_cast<int>(tri));
        for (const TriQuadPoint& p : tri_rule_degree9()) {
            const double x = p.l0 * a[0] + p.l1 * b[0] + p.l2 * c[0];
            const double y = p.l0 * a[1] + p.l1 * b[1] + p.l2 * c[1];
            const auto gw = profile_grad(x, y);
            total += g.area * p.w * (gw[0] * gw[0] + gw[1] * gw[1]);
        }
    }
    return total;
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("problem bank: requires alpha in (0,1)");
}

void fill_common(ProblemSpec& spec, double alpha) {
    const ScalarField w = spec.spatial_profile;
    const VectorField gw = spec.spatial_profile_grad;
    spec.time_factor = [alpha](double t) { return std::pow(t, alpha); };
    spec.exact = [alpha, w](double x, double y, double t) { return std::pow(t, alpha) * w(x, y); };
    spec.exact_grad = [alpha, gw](double x, double y, double t) -> std::array<double, 2> {
        const auto g = gw(x, y);
        const double f = std::pow(t, alpha);
        return {f * g[0], f * g[1]};
    };
    spec.u0_field = [](double, double) { return 0.0; };
    spec.u0_grad = [](double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
    spec.m_fn = {[](double s) { return 1.0 + s; }, [](double) { return 1.0; }};
}

void fill_forcing_parts(ProblemSpec& spec, double alpha) {
    const double gamma_1pa = gamma_function(1.0 + alpha);
    const double energy = spec.energy_constant;
    spec.forcing_parts.clear();
    spec.forcing_parts.push_back({[gamma_1pa](double) { return gamma_1pa; },
                                  spec.spatial_profile});
    spec.forcing_parts.push_back(
        {[alpha, energy](double t) {
             return -(1.0 + energy * std::pow(t, 2.0 * alpha)) * std::pow(t, alpha);
         },
         spec.spatial_laplacian});
    const TimeFactor mem_time = spec.memory_time_integral;
    spec.forcing_parts.push_back(
        {[mem_time](double t) { return -mem_time(t); }, spec.memory_image});
}

}  // namespace

ProblemSpec example_51(double alpha) {
    require_alpha(alpha);
    ProblemSpec spec;
    spec.id = "kirchhoff-sin";
    spec.alpha = alpha;

    // w = A(x) B(y), A(x) = (x-1) sin(pi x)
    const auto factor = [](double x) { return (x - 1.0) * std::sin(kPi * x); };
    const auto dfactor = [](double x) {
        return std::sin(kPi * x) + kPi * (x - 1.0) * std::cos(kPi * x);
    };
    const auto d2factor = [](double x) {
        return 2.0 * kPi * std::cos(kPi * x) - kPi * kPi * (x - 1.0) * std::sin(kPi * x);
    };

    spec.spatial_profile = [=](double x, double y) { return factor(x) * factor(y); };
    spec.spatial_profile_grad = [=](double x, double y) -> std::array<double, 2> {
        return {dfactor(x) * factor(y), factor(x) * dfactor(y)};
    };
    spec.spatial_laplacian = [=](double x, double y) {
        return d2factor(x) * factor(y) + factor(x) * d2factor(y);
    };

    MemoryTerm term;
    term.phi = [](double) { return 1.0; };
    term.psi = [](double) { return 1.0; };
    term.c2 = [](double, double) -> std::array<double, 4> { return {1.0, 0.0, 0.0, 1.0}; };
    term.c1 = [](double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
    term.c0 = [](double, double) { return 0.0; };
    term.diffusive = true;
    spec.memory.terms.push_back(term);

    spec.memory_image = [=](double x, double y) {
        return -(d2factor(x) * factor(y) + factor(x) * d2factor(y));
    };
    spec.memory_time_integral = [alpha](double t) {
        return std::pow(t, 1.0 + alpha) / (1.0 + alpha);
    };
    spec.energy_constant = energy_by_quadrature(spec.spatial_profile_grad, 32);

    fill_common(spec, alpha);

    // standalone closed form, kept independent of forcing_parts for the
    // residual cross-check
    const double c = spec.energy_constant;
    const double gamma_1pa = gamma_function(1.0 + alpha);
    spec.forcing = [=](double x, double y, double t) {
        const double w = (x - 1.0) * std::sin(kPi * x) * (y - 1.0) * std::sin(kPi * y);
        const double lap = d2factor(x) * factor(y) + factor(x) * d2factor(y);
        const double kirchhoff = 1.0 + c * std::pow(t, 2.0 * alpha);
        const double mem = std::pow(t, 1.0 + alpha) / (1.0 + alpha);
        return gamma_1pa * w - kirchhoff * std::pow(t, alpha) * lap + mem * lap;
    };
    fill_forcing_parts(spec, alpha);
    return spec;
}

ProblemSpec example_52(double alpha) {
    require_alpha(alpha);
    ProblemSpec spec;
    spec.id = "kirchhoff-poly";
    spec.alpha = alpha;

    const auto bump = [](double x) { return x - x * x; };
    const auto dbump = [](double x) { return 1.0 - 2.0 * x; };

    spec.spatial_profile = [=](double x, double y) { return bump(x) * bump(y); };
    spec.spatial_profile_grad = [=](double x, double y) -> std::array<double, 2> {
        return {dbump(x) * bump(y), bump(x) * dbump(y)};
    };
    spec.spatial_laplacian = [=](double x, double y) { return -2.0 * (bump(x) + bump(y)); };

    MemoryTerm term;
    term.phi = [](double t) { return 1.0 + t; };
    term.psi = [](double s) { return 1.0 + s; };
    term.c2 = [](double x, double y) -> std::array<double, 4> {
        return {1.0 + x, 0.0, 0.0, 1.0 + y};
    };
    term.c1 = [](double x, double y) -> std::array<double, 2> { return {x, y}; };
    term.c0 = [](double x, double y) { return x * y; };
    term.diffusive = true;
    spec.memory.terms.push_back(term);

    // -div(c2 grad w) + div(c1 w) + c0 w for w = bump(x) bump(y)
    spec.memory_image = [=](double x, double y) {
        const double wx = bump(x), wy = bump(y);
        return (1.0 + 4.0 * x) * wy + (1.0 + 4.0 * y) * wx + 2.0 * wx * wy +
               x * dbump(x) * wy + y * wx * dbump(y) + x * y * wx * wy;
    };
    spec.memory_time_integral = [alpha](double t) {
        return (1.0 + t) * (std::pow(t, 1.0 + alpha) / (1.0 + alpha) +
                            std::pow(t, 2.0 + alpha) / (2.0 + alpha));
    };
    // separable integrals: int (1-2x)^2 = 1/3, int (y-y^2)^2 = 1/30
    spec.energy_constant = 2.0 * (1.0 / 3.0) * (1.0 / 30.0);

    fill_common(spec, alpha);

    const double c = spec.energy_constant;
    const double gamma_1pa = gamma_function(1.0 + alpha);
    spec.forcing = [=](double x, double y, double t) {
        const double wx = x - x * x, wy = y - y * y;
        const double w = wx * wy;
        const double lap = -2.0 * (wx + wy);
        const double kirchhoff = 1.0 + c * std::pow(t, 2.0 * alpha);
        const double mem_time = (1.0 + t) * (std::pow(t, 1.0 + alpha) / (1.0 + alpha) +
                                             std::pow(t, 2.0 + alpha) / (2.0 + alpha));
        const double image = (1.0 + 4.0 * x) * wy + (1.0 + 4.0 * y) * wx + 2.0 * w +
                             x * (1.0 - 2.0 * x) * wy + y * wx * (1.0 - 2.0 * y) +
                             x * y * w;
        return gamma_1pa * w - kirchhoff * std::pow(t, alpha) * lap - mem_time * image;
    };
    fill_forcing_parts(spec, alpha);
    return spec;
}

ProblemSpec problem_by_id(const std::string& id, double alpha) {
    if (id == "kirchhoff-sin") return example_51(alpha);
    if (id == "kirchhoff-poly") return example_52(alpha);
    throw std::invalid_argument("unknown problem id: " + id);
}

double pde_residual(const ProblemSpec& spec, double x, double y, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("pde_residual: requires t > 0");
    const double w = spec.spatial_profile(x, y);
    const double lap = spec.spatial_laplacian(x, y);
    const double caputo = gamma_function(1.0 + spec.alpha) * w;
    const double s = spec.energy_constant * std::pow(t, 2.0 * spec.alpha);
    const double diffusion = spec.m_fn.value(s) * spec.time_factor(t) * lap;
    const double memory = spec.memory_time_integral(t) * spec.memory_image(x, y);
    return caputo - diffusion - memory - spec.forcing(x, y, t);
}

}  // namespace fracfem
