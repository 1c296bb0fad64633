#ifndef FRACFEM_ASSEMBLY_HPP
#define FRACFEM_ASSEMBLY_HPP

#include <array>
#include <functional>
#include <vector>

#include "fracfem/mesh.hpp"
#include "fracfem/sparse.hpp"
#include "fracfem/vec.hpp"

namespace fracfem {

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<std::array<double, 2>(double, double)>;
using MatrixField = std::function<std::array<double, 4>(double, double)>;  // row-major 2x2
using TimeFactor = std::function<double(double)>;

/// One separable term of the memory operator: b(x,t,s) acting through
/// phi(t) psi(s) times spatial parts (c2, c1, c0).
struct MemoryTerm {
    TimeFactor phi;  // of t
    TimeFactor psi;  // of s
    MatrixField c2;
    VectorField c1;
    ScalarField c0;
    bool diffusive = false;  // c2 expected symmetric positive semidefinite
};

struct MemoryCoefficient {
    std::vector<MemoryTerm> terms;
};

/// Checks symmetry/psd of every diffusive c2 on a sample grid; throws on
/// violation or non-finite coefficient values.
void validate_memory_coefficient(const MemoryCoefficient& memory, int samples_per_axis = 9);

// Full-vertex assemblies over all (P+1)^2 vertices; used by invariants that
// involve boundary rows (entry sums, zero row sums).
SparseMatrix assemble_mass_full(const TriMesh& mesh);
SparseMatrix assemble_stiffness_full(const TriMesh& mesh);

// Interior-dof assemblies (homogeneous Dirichlet by elimination).
SparseMatrix assemble_mass(const P1Space& space);
SparseMatrix assemble_stiffness(const P1Space& space);

/// Spatial factor B_k with (B_k)_ij = (c2 grad phi_j, grad phi_i)
/// - (c1 phi_j, grad phi_i) + (c0 phi_j, phi_i); nonsymmetric when c1 != 0.
SparseMatrix assemble_memory_matrix(const P1Space& space, const MemoryTerm& term);

/// Interior-dof load vector (f, phi_i), 7-point degree-5 quadrature.
Vec assemble_load(const P1Space& space, const ScalarField& f);

std::array<std::array<double, 3>, 3> local_mass_matrix(const TriMesh& mesh, int triangle);

/// Stiffness-orthogonal projection: solves K U = G with G_i = (grad u0, grad phi_i).
Vec ritz_projection(const P1Space& space, const ScalarField& u0, const VectorField& grad_u0);

/// Mass-orthogonal projection: solves M U = G with G_i = (g, phi_i).
Vec l2_projection(const P1Space& space, const ScalarField& g);

/// U^T K U (always >= 0 for the SPD stiffness on interior dofs).
double grad_norm_sq(std::span<const double> u, const SparseMatrix& stiffness);

struct ErrorPair {
    double l2 = 0.0;
    double h1 = 0.0;
};

/// L2 and H1-seminorm errors of the P1 function with interior coefficients u
/// against analytic fields, by per-triangle degree-5 quadrature.
ErrorPair error_norms(const P1Space& space, std::span<const double> u, const ScalarField& exact,
                      const VectorField& exact_grad);

/// Same errors sampled with the one-point centroid rule. Gradients of linear
/// elements superconverge at centroids, so these values sit below the true
/// H1 error; error tables produced by centroid sampling compare against this.
ErrorPair centroid_error_norms(const P1Space& space, std::span<const double> u,
                               const ScalarField& exact, const VectorField& exact_grad);

/// Cached per-quad-point data for repeated error evaluation against exact
/// solutions of the separable form factor(t) * profile(x,y).
class SeparableErrorEvaluator {
  public:
    SeparableErrorEvaluator(const P1Space& space, const ScalarField& profile,
                            const VectorField& profile_grad);
    ErrorPair evaluate(std::span<const double> u, double time_factor) const;
    /// centroid-rule counterpart of evaluate()
    ErrorPair evaluate_centroid(std::span<const double> u, double time_factor) const;

  private:
    struct QuadData {
        double weight;  // quad weight * triangle area
        std::array<double, 3> hat;
        double profile;
        std::array<double, 2> profile_grad;
    };
    struct TriData {
        std::array<int, 3> dof;  // -1 on boundary
        std::array<std::array<double, 2>, 3> grad;
        std::array<QuadData, 7> quad;
        double area;
        double centroid_profile;
        std::array<double, 2> centroid_grad;
    };
    std::vector<TriData> tris_;
    int n_dofs_;
};

}  // namespace fracfem

#endif
