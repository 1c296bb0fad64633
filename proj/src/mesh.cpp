#include "fracfem/mesh.hpp"

#include <stdexcept>
#include <utility>

namespace fracfem {

TriMesh build_unit_square_mesh(int subdivisions) {
    if (subdivisions < 1) throw std::invalid_argument("build_unit_square_mesh: requires P >= 1");
    const int p = subdivisions;
    const int nv = (p + 1) * (p + 1);

    TriMesh mesh;
    mesh.subdivisions = p;
    mesh.vertices.reserve(nv);
    mesh.boundary.reserve(nv);
    for (int iy = 0; iy <= p; ++iy) {
        for (int ix = 0; ix <= p; ++ix) {
            mesh.vertices.push_back({static_cast<double>(ix) / p, static_cast<double>(iy) / p});
            mesh.boundary.push_back(ix == 0 || ix == p || iy == 0 || iy == p);
        }
    }
    mesh.triangles.reserve(2 * p * p);
    const auto vid = [p](int ix, int iy) { return iy * (p + 1) + ix; };
    for (int iy = 0; iy < p; ++iy) {
        for (int ix = 0; ix < p; ++ix) {
            const int v00 = vid(ix, iy), v10 = vid(ix + 1, iy);
            const int v01 = vid(ix, iy + 1), v11 = vid(ix + 1, iy + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }
    return mesh;
}

P1Gradients p1_basis_gradients(const TriMesh& mesh, int triangle) {
    const auto& tri = mesh.triangles.at(static_cast<std::size_t>(triangle));
    const auto& a = mesh.vertices[tri[0]];
    const auto& b = mesh.vertices[tri[1]];
    const auto& c = mesh.vertices[tri[2]];
    const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    if (!(det > 0.0)) throw std::invalid_argument("p1_basis_gradients: degenerate triangle");

    P1Gradients g;
    g.area = 0.5 * det;
    g.grad[0] = {(b[1] - c[1]) / det, (c[0] - b[0]) / det};
    g.grad[1] = {(c[1] - a[1]) / det, (a[0] - c[0]) / det};
    g.grad[2] = {(a[1] - b[1]) / det, (b[0] - a[0]) / det};
    return g;
}

P1Space build_p1_space(TriMesh mesh) {
    P1Space space;
    space.vertex_to_dof.assign(mesh.vertices.size(), -1);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        if (!mesh.boundary[v]) {
            space.vertex_to_dof[v] = space.n_dofs++;
            space.dof_to_vertex.push_back(static_cast<int>(v));
        }
    }
    space.mesh = std::move(mesh);
    return space;
}

}  // namespace fracfem
