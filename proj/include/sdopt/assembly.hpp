#ifndef SDOPT_ASSEMBLY_HPP
#define SDOPT_ASSEMBLY_HPP

#include <functional>

#include "sdopt/mesh.hpp"
#include "sdopt/reconstruction.hpp"
#include "sdopt/spaces.hpp"
#include "sdopt/types.hpp"

namespace sdopt {

/// Coefficients, sources, targets, interface residual data, and essential
/// boundary fields of one optimal-control problem instance. Any std::function
/// left empty is treated as identically zero (K: as the identity tensor).
///
/// Interface residual conventions (n = the free-flow-side unit normal, τ its
/// +90° rotation, T(v,q) = 2μD(v) − qI):
///   j₀ = u^s·n^s + u^d·n^d          (mass-jump residual),
///   j₂ = n·T(u^s,p^s)n + p^d        (normal-stress residual),
///   j₃ = τ·T(u^s,p^s)n + (α₁μ/√κ)u^s·τ   (slip residual, stress units),
/// with adjoint analogues j₀ᶻ, j₂ᶻ, j₃ᶻ built from (z, r). All vanish for
/// data that satisfy the physical interface conditions.
struct ProblemData {
  double mu = 1.0;      // viscosity
  double alpha1 = 1.0;  // slip coefficient
  double alpha = 1.0;   // control regularization weight

  std::function<Mat2(const Vec2&)> K;  // permeability tensor on the porous box

  std::function<Vec2(const Vec2&)> f_s, f_d;            // momentum sources
  std::function<Vec2(const Vec2&)> u_star_s, u_star_d;  // velocity target
  std::function<double(const Vec2&)> g_s, g_d;    // state divergence data
  std::function<double(const Vec2&)> gz_s, gz_d;  // adjoint divergence data

  std::function<double(const Vec2&)> j0, j2, j3;     // state Γ residuals
  std::function<double(const Vec2&)> j0z, j2z, j3z;  // adjoint Γ residuals

  std::function<Vec2(const Vec2&)> bc_u_s, bc_u_d;  // essential state data
  std::function<Vec2(const Vec2&)> bc_z_s, bc_z_d;  // essential adjoint data
};

/// K at a point (identity when unset), verified symmetric positive definite.
Mat2 eval_permeability(const ProblemData& data, const Vec2& p);

/// Global unit tangent of the straight interface: the free-flow normal
/// rotated by +90°.
inline Vec2 interface_tangent(const Vec2& n) { return {-n.y(), n.x()}; }

enum class RhsKind { State, Adjoint };
enum class TestMode { Plain, Reconstructed };
enum class MassMode { Plain, PiWeighted };

/// a(u,v) = 2μ(D(u^s),D(v^s))_s + μ(K⁻¹u^d,v^d)_d + (α₁μ/√κ)⟨u^s·τ,v^s·τ⟩_Γ
/// over the combined velocity dofs. Symmetric positive semi-definite.
SpMat assemble_a(const Mesh& mesh, const VelocityPair& vel,
                 const ProblemData& data, int tri_degree = 6,
                 int edge_degree = 5);

/// b(v,q) = −(∇·v^s, q)_s − (∇·v^d, q)_d; rows over pressure dofs.
SpMat assemble_b(const Mesh& mesh, const VelocityPair& vel,
                 const Space& pressure, int tri_degree = 6);

/// Interface flux-matching rows: ⟨v^s·n^s + v^d·n^d, q_i⟩_Γ over the trace
/// basis.
SpMat assemble_interface_constraint(const Mesh& mesh, const VelocityPair& vel,
                                    const Space& trace, int edge_degree = 5);

/// Velocity L² mass: Plain is the block mass on the mixed pair; PiWeighted is
/// Πᵀ M_Y Π with M_Y the RT mass on the reconstruction target (requires
/// `recon`). Both symmetric positive semi-definite.
SpMat assemble_velocity_mass(const Mesh& mesh, const VelocityPair& vel,
                             MassMode mode,
                             const ReconstructionOperator* recon = nullptr,
                             int tri_degree = 6);

/// Load vector over combined velocity dofs.
///   State:   (f, ψ) + ⟨j₂, ψ^s·n^s⟩_Γ + ⟨j₃, ψ^s·τ⟩_Γ
///   Adjoint: −α^{−1/2}(u*, ψ) + ⟨j₂ᶻ, ψ^s·n^s⟩_Γ + ⟨j₃ᶻ, ψ^s·τ⟩_Γ
/// Reconstructed mode tests the volume pairing against Πψ instead of ψ
/// (interface residual loads stay on the plain trace) and requires `recon`.
/// The default degree-10 rules integrate polynomial perturbation loads of
/// total degree ≤ 10 exactly.
VecX assemble_rhs(const Mesh& mesh, const VelocityPair& vel,
                  const ProblemData& data, RhsKind which, TestMode mode,
                  const ReconstructionOperator* recon = nullptr,
                  int tri_degree = 10, int edge_degree = 10);

/// Per-dof integrals ∫ q_i of the pressure basis (the global zero-mean row).
VecX assemble_pressure_integral(const Mesh& mesh, const Space& pressure,
                                int tri_degree = 2);

/// Loads (g^s, q_i)_s + (g^d, q_i)_d over the pressure dofs (plain pairing;
/// callers choose the sign their equation needs).
VecX assemble_pressure_load(const Mesh& mesh, const Space& pressure,
                            const std::function<double(const Vec2&)>& fn_s,
                            const std::function<double(const Vec2&)>& fn_d,
                            int tri_degree = 10);

/// Loads ⟨j, χ_i⟩_Γ over the interface-trace dofs.
VecX assemble_trace_load(const Mesh& mesh, const Space& trace,
                         const std::function<double(const Vec2&)>& fn,
                         int edge_degree = 10);

/// L² mass of one RT1 space (helper for the reconstruction-weighted forms).
SpMat assemble_rt_mass(const Mesh& mesh, const Space& rt, int tri_degree = 6);

/// Loads ∫ field·χ_i over one RT1 space.
VecX assemble_rt_load(const Mesh& mesh, const Space& rt,
                      const std::function<Vec2(const Vec2&)>& field,
                      int tri_degree = 10);

}  // namespace sdopt

#endif  // SDOPT_ASSEMBLY_HPP
