#ifndef FRACFEM_QUADRATURE_HPP
#define FRACFEM_QUADRATURE_HPP

#include <span>

namespace fracfem {

/// Barycentric quadrature point; weights sum to 1, so integrals over a
/// triangle are area * sum(w * f).
struct TriQuadPoint {
    double l0, l1, l2, w;
};

/// 7-point symmetric rule, exact for polynomial degree 5. Production rule for
/// all variable-coefficient integrals and error norms.
std::span<const TriQuadPoint> tri_rule_degree5();

/// 19-point symmetric rule, exact for degree 9. Used for the one-off energy
/// constants of the problem bank.
std::span<const TriQuadPoint> tri_rule_degree9();

}  // namespace fracfem

#endif
