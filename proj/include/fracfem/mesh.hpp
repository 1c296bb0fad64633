#ifndef FRACFEM_MESH_HPP
#define FRACFEM_MESH_HPP

#include <array>
#include <vector>

namespace fracfem {

/// Structured triangulation of the unit square: (P+1)^2 vertices, every cell
/// split along the lower-left to upper-right diagonal, 2 P^2 counterclockwise
/// triangles.
struct TriMesh {
    int subdivisions = 0;  // P
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<bool> boundary;  // per vertex
};

TriMesh build_unit_square_mesh(int subdivisions);

/// Constant gradients of the three nodal hat functions on a triangle, plus
/// its area. The three gradients sum to zero.
struct P1Gradients {
    std::array<std::array<double, 2>, 3> grad;
    double area;
};

P1Gradients p1_basis_gradients(const TriMesh& mesh, int triangle);

/// Piecewise-linear space with homogeneous Dirichlet data imposed by
/// excluding boundary vertices from the dof set.
struct P1Space {
    TriMesh mesh;
    int n_dofs = 0;
    std::vector<int> vertex_to_dof;  // -1 on the boundary
    std::vector<int> dof_to_vertex;
};

P1Space build_p1_space(TriMesh mesh);

inline P1Space build_p1_space(int subdivisions) {
    return build_p1_space(build_unit_square_mesh(subdivisions));
}

}  // namespace fracfem

#endif
