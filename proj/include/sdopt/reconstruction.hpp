#ifndef SDOPT_RECONSTRUCTION_HPP
#define SDOPT_RECONSTRUCTION_HPP

#include <functional>

#include "sdopt/fe_function.hpp"
#include "sdopt/spaces.hpp"
#include "sdopt/types.hpp"

namespace sdopt {

/// Element-local reconstruction into Raviart-Thomas fields: maps the combined
/// velocity dofs onto the RT target pair Y = RT1(free-flow) × RT1(porous).
/// On the porous side the map is the identity (the physical space already is
/// RT1); on the free-flow side each continuous velocity basis function is
/// replaced element-by-element by the RT1 field with the same edge normal
/// moments (against P1 of the global edge parameter) and the same interior
/// [P0]² moments. The two Y subspaces keep independent interface-edge dofs,
/// so a reconstructed field may jump across the interface unless the velocity
/// it came from satisfies the discrete interface constraint.
///
/// Y dof layout matches the velocity layout: free-flow RT dofs first, then
/// the porous dofs at y_darcy_offset().
struct ReconstructionOperator {
  SpMat Pi;          // (y_ndof) × (combined velocity dofs)
  Space rt_stokes;   // RT1 target on the free-flow subdomain
  const Space* darcy = nullptr;
  int y_ndof = 0;
  int y_darcy_offset() const { return rt_stokes.ndof; }
};

/// Build the reconstruction operator for a velocity pair.
ReconstructionOperator build_reconstruction(const Mesh& mesh,
                                            const VelocityPair& vel);

/// Interpolate a smooth vector field into an RT1 space by its dof moments
/// (edge normal moments and interior averages, quadrature-evaluated).
FeFunction rt_interpolate(const Space& rt,
                          const std::function<Vec2(const Vec2&)>& field,
                          int edge_degree = 5, int tri_degree = 4);

/// The consistency error functional
///   ϑ_φ(ψ) = b(ψ, φ) − ⟨ψ^s·n^s + ψ^d·n^d, φ^d⟩_Γ
/// for a pressure-like pair φ = (φ^s, φ^d) of smooth scalar fields and a
/// discrete velocity pair ψ = (ψ^s, ψ^d). It vanishes on fields that are
/// exactly divergence-free with exactly continuous interface normal flux —
/// reconstructed admissible fields in particular.
double consistency_functional(const FeFunction& psi_s, const FeFunction& psi_d,
                              const std::function<double(const Vec2&)>& phi_s,
                              const std::function<double(const Vec2&)>& phi_d,
                              int tri_degree = 8, int edge_degree = 8);

/// Interpolate a smooth velocity pair onto the combined dof vector: pointwise
/// node values on the free-flow side, RT moments on the porous side.
VecX interpolate_velocity(const Mesh& mesh, const VelocityPair& vel,
                          const std::function<Vec2(const Vec2&)>& field_s,
                          const std::function<Vec2(const Vec2&)>& field_d,
                          int edge_degree = 5, int tri_degree = 4);

/// Largest pointwise |∇·w| over all triangles of a reconstructed field
/// w = Π v given by its target-space coefficients y. The divergence is
/// element-wise linear, so sampling vertices, edge midpoints, and the
/// centroid bounds the true maximum.
double max_cell_divergence(const ReconstructionOperator& op, const VecX& y);

/// Largest pointwise normal jump |w^s·n − w^d·n| across the interface for a
/// reconstructed field given by its target-space coefficients y. Traces are
/// edge-wise linear in the edge parameter.
double max_interface_normal_jump(const ReconstructionOperator& op,
                                 const VecX& y);

}  // namespace sdopt

#endif  // SDOPT_RECONSTRUCTION_HPP
