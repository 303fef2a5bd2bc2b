#ifndef SDOPT_SPACES_HPP
#define SDOPT_SPACES_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "sdopt/mesh.hpp"
#include "sdopt/types.hpp"

namespace sdopt {

/// The four discrete spaces of the coupled problem at polynomial order k = 2:
///  - StokesVelocity: vector-valued, per component P2 enriched with the cubic
///    cell bubble 27·λ0λ1λ2, continuous, on the free-flow subdomain.
///  - Pressure: discontinuous P1, 3 dofs per triangle, on the whole domain.
///  - DarcyVelocity: Raviart-Thomas RT1, 8 dofs per triangle (2 moments per
///    edge + 2 interior moments), normal-trace conforming, on one subdomain
///    (the porous one for the physical space; the free-flow one is used as a
///    reconstruction target).
///  - InterfaceTrace: discontinuous P1 on each interface edge, 2 dofs per
///    edge (the normal-trace space of RT1 on the interface).
enum class SpaceKind {
  StokesVelocity,
  Pressure,
  DarcyVelocity,
  InterfaceTrace,
};

/// Global dof table for one discrete space on one mesh. Immutable after
/// construction; all evaluation queries are const and thread-safe.
///
/// Dof conventions (all orientation signs are +1 by construction, because
/// every shared dof is defined through a globally oriented functional):
///  - StokesVelocity: scalar nodes are numbered vertices first, then edge
///    midpoints, then cell centers; global dof = 2·node + component.
///  - DarcyVelocity: per mesh edge of the subdomain, 2 moment dofs against
///    the P1 basis {1−t, t} of the globally oriented edge parameter, with
///    the globally stored edge normal; then 2 interior dofs ∫ v·e_c per
///    triangle. Shared edges therefore contribute identical functionals to
///    both incident triangles.
///  - Pressure: dof 3·tri + i is the barycentric (vertex-nodal) P1 basis.
///  - InterfaceTrace: dof 2·k + i for the k-th interface edge, nodal values
///    {1−t, t} in the global edge parameter.
struct Space {
  SpaceKind kind;
  const Mesh* mesh = nullptr;
  Subdomain subdomain = Subdomain::Darcy;  // meaningful for DarcyVelocity
  int ndof = 0;

  /// Global dofs of each mesh triangle in local basis order; empty for
  /// triangles outside the space's subdomain. StokesVelocity lists 14
  /// (node-major, component-minor), DarcyVelocity 8, Pressure 3.
  std::vector<std::vector<int>> cell_dofs;

  /// Essential-boundary flag per dof: Dirichlet nodes on the free-flow outer
  /// boundary for StokesVelocity, normal-flux edge dofs on the subdomain's
  /// outer boundary for DarcyVelocity. Empty means no flagged dofs.
  std::vector<std::uint8_t> boundary_dof;

  // StokesVelocity bookkeeping (scalar nodes).
  int num_nodes = 0;
  std::vector<Vec2> node_pos;        // position of each scalar node
  std::vector<int> vertex_node;      // per mesh vertex: node id or -1
  std::vector<int> edge_node;        // per mesh edge: midpoint node id or -1
  std::vector<int> center_node;      // per mesh triangle: node id or -1

  // DarcyVelocity bookkeeping.
  std::vector<int> rt_edge_dof;      // per mesh edge: first of 2 dofs or -1
  std::vector<int> rt_tri_dof;       // per mesh tri: first of 2 interior dofs
  std::vector<MatX> rt_coeff;        // per mesh tri: 8×8 nodal coefficients

  // InterfaceTrace bookkeeping.
  std::vector<int> trace_edge;       // interface edge id of dof pair k
  std::vector<int> edge_trace_index; // per mesh edge: pair index k or -1
};

/// Build the dof table of one space. `sub` selects the carrier subdomain for
/// DarcyVelocity and is ignored otherwise.
Space make_space(const Mesh& mesh, SpaceKind kind,
                 Subdomain sub = Subdomain::Darcy);

/// Values of all local shape functions of a space on one triangle at a
/// reference point. Layouts per kind:
///  - StokesVelocity: the 7 scalar node functions (values n×1, gradients n×2
///    in physical coordinates); the vector shape for local dof 2i+c is
///    (scalar i)·e_c, matching cell_dofs order.
///  - Pressure: 3 barycentric values (n×1) and their constant gradients.
///  - DarcyVelocity: 8 vector values (n×2, Piola-mapped) and divergence.
struct BasisEval {
  MatX values;
  MatX gradients;
  VecX divergence;
};

/// Evaluate the local basis. `ref` is the reference/barycentric point
/// (λ1, λ2); the point must lie in the closed reference triangle.
/// InterfaceTrace bases live on edges, not triangles → argument error.
BasisEval eval_basis(const Space& s, int tri, const Vec2& ref);

/// The two interface-trace shape values {1−t, t} at edge parameter t.
inline Vec2 trace_basis(double t) { return {1.0 - t, t}; }

/// Global dof indices and orientation signs of one entity: a triangle for
/// the volume spaces, an interface edge for InterfaceTrace. All signs are
/// +1 under this dof convention; they are reported so callers need not
/// assume it.
struct DofMap {
  std::vector<int> dofs;
  std::vector<double> signs;
};
DofMap dof_map(const Space& s, int entity);

/// Raw Piola-mapped RT1 monomial frame on one triangle: values (8×2) and
/// divergences (8) at a reference point, before nodal-coefficient mixing.
/// Exposed for the reconstruction operator and for map-property tests.
void rt_monomials(const TriGeometry& g, const Vec2& ref, MatX& values,
                  VecX& divergence);

/// Moments ∫_e (field·n_e) q_k ds, k = 0,1, of an arbitrary flux field
/// against the global P1 edge basis, with the stored global edge normal.
/// Used for essential Darcy data and for RT interpolation.
Vec2 edge_normal_moments(const Mesh& mesh, int edge,
                         const std::function<Vec2(const Vec2&)>& field,
                         int quad_degree = 5);

/// The combined velocity space: continuous vector elements on the free-flow
/// subdomain stacked before the RT space on the porous one. Global combined
/// dof = Stokes dof, or darcy_offset() + Darcy dof.
struct VelocityPair {
  const Space* stokes = nullptr;
  const Space* darcy = nullptr;
  int ndof() const { return stokes->ndof + darcy->ndof; }
  int darcy_offset() const { return stokes->ndof; }
};

}  // namespace sdopt

#endif  // SDOPT_SPACES_HPP
