#ifndef SDOPT_SYSTEM_HPP
#define SDOPT_SYSTEM_HPP

#include <cstdint>
#include <vector>

#include "sdopt/assembly.hpp"
#include "sdopt/mesh.hpp"
#include "sdopt/reconstruction.hpp"
#include "sdopt/spaces.hpp"
#include "sdopt/types.hpp"

namespace sdopt {

/// Discretization variant: Classical couples state and rescaled adjoint with
/// the plain velocity mass and pairs volume data against plain test
/// functions; Robust replaces both by their reconstructed counterparts
/// (ΠᵀM_YΠ coupling, Πᵀ-lifted volume loads, Π-mapped tracking and control
/// terms). Interface residual loads are identical in both variants.
enum class SchemeTag { Classical, Robust };

/// Monolithic symmetric indefinite system for the discrete optimality
/// conditions. Unknown layout:
///   [u (nv) | z (nv) | p (np) | r (np) | λ_u (nt) | λ_z (nt) | m_p | m_r]
/// with u, z the state/rescaled-adjoint velocities, p, r the pressures, λ
/// the interface flux multipliers, and m_p, m_r scalar multipliers of the
/// global zero-mean pressure constraints. The adjoint-derived block rows are
/// negated so the assembled matrix is exactly symmetric. Essential boundary
/// dofs are eliminated symmetrically: their rows/columns are identity and
/// their prescribed values sit in `rhs` and `essential`.
struct BlockSystem {
  SchemeTag scheme = SchemeTag::Classical;
  int nv = 0, np = 0, nt = 0;

  SpMat matrix;
  VecX rhs;
  VecX essential;                        // prescribed value at eliminated dofs
  std::vector<std::uint8_t> eliminated;  // mask over all unknowns
  SpMat eta_map;                         // control recovery: η = eta_map · z

  int off_u() const { return 0; }
  int off_z() const { return nv; }
  int off_p() const { return 2 * nv; }
  int off_r() const { return 2 * nv + np; }
  int off_lu() const { return 2 * (nv + np); }
  int off_lz() const { return 2 * (nv + np) + nt; }
  int off_mp() const { return 2 * (nv + np + nt); }
  int off_mr() const { return 2 * (nv + np + nt) + 1; }
  int size() const { return 2 * (nv + np + nt) + 2; }
};

/// Solved optimality system, split back into fields. `eta` holds the
/// recovered control coefficients: in the combined velocity space for the
/// classical scheme (η = −α^{-1/2} z), in the reconstruction target space for
/// the robust scheme (η = −α^{-1/2} Π z).
struct Solution {
  VecX u, z;
  VecX p, r;
  VecX lambda_u, lambda_z;
  double m_p = 0.0, m_r = 0.0;
  VecX eta;
  double residual = 0.0;  // relative solve residual
};

/// Assemble the optimality system. The robust scheme requires `recon` built
/// for the same velocity pair (argument error otherwise). `data.alpha` may be
/// +infinity, which zeroes the state/adjoint coupling.
BlockSystem build_system(const Mesh& mesh, const VelocityPair& vel,
                         const Space& pressure, const Space& trace,
                         const ProblemData& data, SchemeTag scheme,
                         const ReconstructionOperator* recon = nullptr);

/// Direct sparse factorization with one step of iterative refinement.
/// Relative residual must reach 1e-10 (solver error otherwise, also on
/// breakdown of the factorization).
Solution solve(const BlockSystem& sys);

/// Solve only the state sub-problem [u, p, λ_u, m_p] for a prescribed
/// control: the control load is (η, ψ) for the classical scheme (η given in
/// the combined velocity space) and (η, Πψ) for the robust one (η given in
/// the reconstruction target space). Returns the velocity coefficients.
VecX solve_state(const Mesh& mesh, const VelocityPair& vel,
                 const Space& pressure, const Space& trace,
                 const ProblemData& data, SchemeTag scheme,
                 const ReconstructionOperator* recon, const VecX& control);

/// ½‖u_h − u*‖² (classical) or ½‖Π u_h − u*‖² (robust) for velocity
/// coefficients u in the combined space.
double tracking_term(const Mesh& mesh, const VelocityPair& vel,
                     const ProblemData& data, const VecX& u, SchemeTag scheme,
                     const ReconstructionOperator* recon = nullptr,
                     int tri_degree = 10);

/// (α/2)‖η_h‖² for control coefficients in the scheme's control space (see
/// Solution::eta).
double control_term(const Mesh& mesh, const VelocityPair& vel,
                    const ProblemData& data, const VecX& eta, SchemeTag scheme,
                    const ReconstructionOperator* recon = nullptr,
                    int tri_degree = 10);

/// The scheme's cost functional at a solved optimality system:
/// tracking_term(u) + control_term(η).
double evaluate_cost(const Mesh& mesh, const VelocityPair& vel,
                     const ProblemData& data, const Solution& sol,
                     SchemeTag scheme,
                     const ReconstructionOperator* recon = nullptr,
                     int tri_degree = 10);

}  // namespace sdopt

#endif  // SDOPT_SYSTEM_HPP
