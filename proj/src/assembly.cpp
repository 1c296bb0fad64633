#include "fracfem/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "fracfem/linalg.hpp"
#include "fracfem/quadrature.hpp"

namespace fracfem {

namespace {

using Local3x3 = std::array<std::array<double, 3>, 3>;

struct QuadXY {
    double x, y, w;
    std::array<double, 3> hat;
};

std::array<QuadXY, 7> quad_points_on(const TriMesh& mesh, int tri) {
    const auto rule = tri_rule_degree5();
    const auto& t = mesh.triangles[tri];
    const auto& a = mesh.vertices[t[0]];
    const auto& b = mesh.vertices[t[1]];
    const auto& c = mesh.vertices[t[2]];
    std::array<QuadXY, 7> out;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const TriQuadPoint& p = rule[q];
        out[q] = {p.l0 * a[0] + p.l1 * b[0] + p.l2 * c[0],
                  p.l0 * a[1] + p.l1 * b[1] + p.l2 * c[1],
                  p.w,
                  {p.l0, p.l1, p.l2}};
    }
    return out;
}

// assembles sum over triangles of local(tri) into vertex- or dof-indexed CSR
template <typename LocalFn>
SparseMatrix assemble_matrix(const TriMesh& mesh, const std::vector<int>* vertex_to_dof, int n,
                             LocalFn&& local) {
    std::vector<Triplet> trip;
    trip.reserve(mesh.triangles.size() * 9);
    for (std::size_t tri = 0; tri < mesh.triangles.size(); ++tri) {
        const Local3x3 lm = local(static_cast<int>(tri));
        const auto& t = mesh.triangles[tri];
        for (int a = 0; a < 3; ++a) {
            const int ra = vertex_to_dof ? (*vertex_to_dof)[t[a]] : t[a];
            if (ra < 0) continue;
            for (int b = 0; b < 3; ++b) {
                const int cb = vertex_to_dof ? (*vertex_to_dof)[t[b]] : t[b];
                if (cb < 0) continue;
                trip.push_back({ra, cb, lm[a][b]});
            }
        }
    }
    return SparseMatrix::from_triplets(n, n, std::move(trip));
}

Local3x3 local_mass(const TriMesh& mesh, int tri) {
    const P1Gradients g = p1_basis_gradients(mesh, tri);
    Local3x3 lm{};
    for (const TriQuadPoint& p : tri_rule_degree5()) {
        const std::array<double, 3> l = {p.l0, p.l1, p.l2};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) lm[a][b] += g.area * p.w * l[a] * l[b];
    }
    return lm;
}

Local3x3 local_stiffness(const TriMesh& mesh, int tri) {
    const P1Gradients g = p1_basis_gradients(mesh, tri);
    Local3x3 lm{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            lm[a][b] =
                g.area * (g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1]);
    return lm;
}

Local3x3 local_memory(const TriMesh& mesh, int tri, const MemoryTerm& term) {
    const P1Gradients g = p1_basis_gradients(mesh, tri);
    Local3x3 lm{};
    for (const QuadXY& q : quad_points_on(mesh, tri)) {
        const auto c2 = term.c2(q.x, q.y);
        const auto c1 = term.c1(q.x, q.y);
        const double c0 = term.c0(q.x, q.y);
        for (double v : c2)
            if (!std::isfinite(v))
                throw std::runtime_error("assemble_memory_matrix: non-finite c2 value");
        if (!std::isfinite(c1[0]) || !std::isfinite(c1[1]) || !std::isfinite(c0))
            throw std::runtime_error("assemble_memory_matrix: non-finite coefficient value");
        const double wa = g.area * q.w;
        for (int a = 0; a < 3; ++a) {
            const auto& ga = g.grad[a];
            const double c1_ga = c1[0] * ga[0] + c1[1] * ga[1];
            for (int b = 0; b < 3; ++b) {
                const auto& gb = g.grad[b];
                const double c2gb_ga = (c2[0] * gb[0] + c2[1] * gb[1]) * ga[0] +
                                       (c2[2] * gb[0] + c2[3] * gb[1]) * ga[1];
                lm[a][b] += wa * (c2gb_ga - q.hat[b] * c1_ga + c0 * q.hat[a] * q.hat[b]);
            }
        }
    }
    return lm;
}

}  // namespace

void validate_memory_coefficient(const MemoryCoefficient& memory, int samples_per_axis) {
    for (const MemoryTerm& term : memory.terms) {
        for (int iy = 0; iy < samples_per_axis; ++iy) {
            for (int ix = 0; ix < samples_per_axis; ++ix) {
                const double x = static_cast<double>(ix) / (samples_per_axis - 1);
                const double y = static_cast<double>(iy) / (samples_per_axis - 1);
                const auto c2 = term.c2(x, y);
                const auto c1 = term.c1(x, y);
                const double c0 = term.c0(x, y);
                for (double v : c2)
                    if (!std::isfinite(v))
                        throw std::runtime_error("memory coefficient: non-finite c2");
                if (!std::isfinite(c1[0]) || !std::isfinite(c1[1]) || !std::isfinite(c0))
                    throw std::runtime_error("memory coefficient: non-finite c1/c0");
                if (term.diffusive) {
                    const double tol = 1e-12;
                    const double det = c2[0] * c2[3] - c2[1] * c2[2];
                    if (std::abs(c2[1] - c2[2]) > tol || c2[0] < -tol || c2[3] < -tol ||
                        det < -tol)
                        throw std::runtime_error(
                            "memory coefficient: diffusive c2 not symmetric psd");
                }
            }
        }
    }
}

SparseMatrix assemble_mass_full(const TriMesh& mesh) {
    SparseMatrix m =
        assemble_matrix(mesh, nullptr, static_cast<int>(mesh.vertices.size()),
                        [&](int tri) { return local_mass(mesh, tri); });
    m.mark_symmetric();
    return m;
}

SparseMatrix assemble_stiffness_full(const TriMesh& mesh) {
    SparseMatrix m =
        assemble_matrix(mesh, nullptr, static_cast<int>(mesh.vertices.size()),
                        [&](int tri) { return local_stiffness(mesh, tri); });
    m.mark_symmetric();
    return m;
}

SparseMatrix assemble_mass(const P1Space& space) {
    SparseMatrix m = assemble_matrix(space.mesh, &space.vertex_to_dof, space.n_dofs,
                                     [&](int tri) { return local_mass(space.mesh, tri); });
    m.mark_symmetric();
    return m;
}

SparseMatrix assemble_stiffness(const P1Space& space) {
    SparseMatrix m = assemble_matrix(space.mesh, &space.vertex_to_dof, space.n_dofs,
                                     [&](int tri) { return local_stiffness(space.mesh, tri); });
    m.mark_symmetric();
    return m;
}

SparseMatrix assemble_memory_matrix(const P1Space& space, const MemoryTerm& term) {
    return assemble_matrix(space.mesh, &space.vertex_to_dof, space.n_dofs,
                           [&](int tri) { return local_memory(space.mesh, tri, term); });
}

Vec assemble_load(const P1Space& space, const ScalarField& f) {
    Vec load(static_cast<std::size_t>(space.n_dofs), 0.0);
    for (std::size_t tri = 0; tri < space.mesh.triangles.size(); ++tri) {
        const P1Gradients g = p1_basis_gradients(space.mesh, static_cast<int>(tri));
        const auto& t = space.mesh.triangles[tri];
        for (const QuadXY& q : quad_points_on(space.mesh, static_cast<int>(tri))) {
            const double fv = f(q.x, q.y);
            if (!std::isfinite(fv))
                throw std::runtime_error("assemble_load: non-finite field value");
            const double wa = g.area * q.w * fv;
            for (int a = 0; a < 3; ++a) {
                const int dof = space.vertex_to_dof[t[a]];
                if (dof >= 0) load[dof] += wa * q.hat[a];
            }
        }
    }
    return load;
}

std::array<std::array<double, 3>, 3> local_mass_matrix(const TriMesh& mesh, int triangle) {
    return local_mass(mesh, triangle);
}

Vec ritz_projection(const P1Space& space, const ScalarField&, const VectorField& grad_u0) {
    // only the gradient of u0 enters the projection system
    Vec rhs(static_cast<std::size_t>(space.n_dofs), 0.0);
    for (std::size_t tri = 0; tri < space.mesh.triangles.size(); ++tri) {
        const P1Gradients g = p1_basis_gradients(space.mesh, static_cast<int>(tri));
        const auto& t = space.mesh.triangles[tri];
        for (const QuadXY& q : quad_points_on(space.mesh, static_cast<int>(tri))) {
            const auto gu = grad_u0(q.x, q.y);
            if (!std::isfinite(gu[0]) || !std::isfinite(gu[1]))
                throw std::runtime_error("ritz_projection: non-finite gradient value");
            const double wa = g.area * q.w;
            for (int a = 0; a < 3; ++a) {
                const int dof = space.vertex_to_dof[t[a]];
                if (dof >= 0)
                    rhs[dof] += wa * (gu[0] * g.grad[a][0] + gu[1] * g.grad[a][1]);
            }
        }
    }
    const SparseMatrix k = assemble_stiffness(space);
    return cg_solve(k, rhs, 1e-13);
}

Vec l2_projection(const P1Space& space, const ScalarField& g) {
    const Vec rhs = assemble_load(space, g);
    const SparseMatrix m = assemble_mass(space);
    return cg_solve(m, rhs, 1e-13);
}

double grad_norm_sq(std::span<const double> u, const SparseMatrix& stiffness) {
    if (static_cast<int>(u.size()) != stiffness.rows())
        throw std::invalid_argument("grad_norm_sq: size mismatch");
    const double v = dot(u, stiffness.multiply(u));
    return v < 0.0 ? 0.0 : v;
}

ErrorPair error_norms(const P1Space& space, std::span<const double> u, const ScalarField& exact,
                      const VectorField& exact_grad) {
    if (static_cast<int>(u.size()) != space.n_dofs)
        throw std::invalid_argument("error_norms: coefficient size mismatch");
    double l2 = 0.0, h1 = 0.0;
    for (std::size_t tri = 0; tri < space.mesh.triangles.size(); ++tri) {
        const P1Gradients g = p1_basis_gradients(space.mesh, static_cast<int>(tri));
        const auto& t = space.mesh.triangles[tri];
        std::array<double, 3> coef{};
        for (int a = 0; a < 3; ++a) {
            const int dof = space.vertex_to_dof[t[a]];
            coef[a] = dof >= 0 ? u[dof] : 0.0;
        }
        const std::array<double, 2> gh = {
            coef[0] * g.grad[0][0] + coef[1] * g.grad[1][0] + coef[2] * g.grad[2][0],
            coef[0] * g.grad[0][1] + coef[1] * g.grad[1][1] + coef[2] * g.grad[2][1]};
        for (const QuadXY& q : quad_points_on(space.mesh, static_cast<int>(tri))) {
            const double ue = exact(q.x, q.y);
            const auto ge = exact_grad(q.x, q.y);
            if (!std::isfinite(ue) || !std::isfinite(ge[0]) || !std::isfinite(ge[1]))
                throw std::runtime_error("error_norms: non-finite field value");
            const double uh = coef[0] * q.hat[0] + coef[1] * q.hat[1] + coef[2] * q.hat[2];
            const double dx = ge[0] - gh[0], dy = ge[1] - gh[1];
            l2 += g.area * q.w * (ue - uh) * (ue - uh);
            h1 += g.area * q.w * (dx * dx + dy * dy);
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

ErrorPair centroid_error_norms(const P1Space& space, std::span<const double> u,
                               const ScalarField& exact, const VectorField& exact_grad) {
    if (static_cast<int>(u.size()) != space.n_dofs)
        throw std::invalid_argument("centroid_error_norms: coefficient size mismatch");
    double l2 = 0.0, h1 = 0.0;
    for (std::size_t tri = 0; tri < space.mesh.triangles.size(); ++tri) {
        const P1Gradients g = p1_basis_gradients(space.mesh, static_cast<int>(tri));
        const auto& t = space.mesh.triangles[tri];
        double cx = 0.0, cy = 0.0, uh = 0.0, ghx = 0.0, ghy = 0.0;
        for (int a = 0; a < 3; ++a) {
            cx += space.mesh.vertices[t[a]][0] / 3.0;
            cy += space.mesh.vertices[t[a]][1] / 3.0;
            const int dof = space.vertex_to_dof[t[a]];
            const double c = dof >= 0 ? u[dof] : 0.0;
            uh += c / 3.0;
            ghx += c * g.grad[a][0];
            ghy += c * g.grad[a][1];
        }
        const double ue = exact(cx, cy);
        const auto ge = exact_grad(cx, cy);
        if (!std::isfinite(ue) || !std::isfinite(ge[0]) || !std::isfinite(ge[1]))
            throw std::runtime_error("centroid_error_norms: non-finite field value");
        l2 += g.area * (ue - uh) * (ue - uh);
        h1 += g.area * ((ge[0] - ghx) * (ge[0] - ghx) + (ge[1] - ghy) * (ge[1] - ghy));
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

SeparableErrorEvaluator::SeparableErrorEvaluator(const P1Space& space, const ScalarField& profile,
                                                 const VectorField& profile_grad)
    : n_dofs_(space.n_dofs) {
    tris_.resize(space.mesh.triangles.size());
    for (std::size_t tri = 0; tri < space.mesh.triangles.size(); ++tri) {
        const P1Gradients g = p1_basis_gradients(space.mesh, static_cast<int>(tri));
        const auto& t = space.mesh.triangles[tri];
        TriData& td = tris_[tri];
        td.grad = g.grad;
        td.area = g.area;
        for (int a = 0; a < 3; ++a) td.dof[a] = space.vertex_to_dof[t[a]];
        const auto pts = quad_points_on(space.mesh, static_cast<int>(tri));
        for (std::size_t q = 0; q < pts.size(); ++q) {
            td.quad[q].weight = g.area * pts[q].w;
            td.quad[q].hat = pts[q].hat;
            td.quad[q].profile = profile(pts[q].x, pts[q].y);
            td.quad[q].profile_grad = profile_grad(pts[q].x, pts[q].y);
        }
        double cx = 0.0, cy = 0.0;
        for (int a = 0; a < 3; ++a) {
            cx += space.mesh.vertices[t[a]][0] / 3.0;
            cy += space.mesh.vertices[t[a]][1] / 3.0;
        }
        td.centroid_profile = profile(cx, cy);
        td.centroid_grad = profile_grad(cx, cy);
    }
}

ErrorPair SeparableErrorEvaluator::evaluate_centroid(std::span<const double> u,
                                                     double time_factor) const {
    if (static_cast<int>(u.size()) != n_dofs_)
        throw std::invalid_argument("SeparableErrorEvaluator: coefficient size mismatch");
    double l2 = 0.0, h1 = 0.0;
    for (const TriData& td : tris_) {
        std::array<double, 3> coef{};
        for (int a = 0; a < 3; ++a) coef[a] = td.dof[a] >= 0 ? u[td.dof[a]] : 0.0;
        const double uh = (coef[0] + coef[1] + coef[2]) / 3.0;
        const double ghx =
            coef[0] * td.grad[0][0] + coef[1] * td.grad[1][0] + coef[2] * td.grad[2][0];
        const double ghy =
            coef[0] * td.grad[0][1] + coef[1] * td.grad[1][1] + coef[2] * td.grad[2][1];
        const double e = time_factor * td.centroid_profile - uh;
        const double dx = time_factor * td.centroid_grad[0] - ghx;
        const double dy = time_factor * td.centroid_grad[1] - ghy;
        l2 += td.area * e * e;
        h1 += td.area * (dx * dx + dy * dy);
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

ErrorPair SeparableErrorEvaluator::evaluate(std::span<const double> u, double time_factor) const {
    if (static_cast<int>(u.size()) != n_dofs_)
        throw std::invalid_argument("SeparableErrorEvaluator: coefficient size mismatch");
    double l2 = 0.0, h1 = 0.0;
    for (const TriData& td : tris_) {
        std::array<double, 3> coef{};
        for (int a = 0; a < 3; ++a) coef[a] = td.dof[a] >= 0 ? u[td.dof[a]] : 0.0;
        const double ghx =
            coef[0] * td.grad[0][0] + coef[1] * td.grad[1][0] + coef[2] * td.grad[2][0];
        const double ghy =
            coef[0] * td.grad[0][1] + coef[1] * td.grad[1][1] + coef[2] * td.grad[2][1];
        for (const QuadData& q : td.quad) {
            const double uh = coef[0] * q.hat[0] + coef[1] * q.hat[1] + coef[2] * q.hat[2];
            const double e = time_factor * q.profile - uh;
            const double dx = time_factor * q.profile_grad[0] - ghx;
            const double dy = time_factor * q.profile_grad[1] - ghy;
            l2 += q.weight * e * e;
            h1 += q.weight * (dx * dx + dy * dy);
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

}  // namespace fracfem
