#ifndef SDOPT_VERIFY_HPP
#define SDOPT_VERIFY_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "sdopt/assembly.hpp"
#include "sdopt/jet.hpp"
#include "sdopt/mesh.hpp"
#include "sdopt/spaces.hpp"
#include "sdopt/system.hpp"
#include "sdopt/types.hpp"

namespace sdopt {

/// Scalar field with analytic derivatives through second order, evaluated by
/// automatic differentiation on seeded jets.
using JetFn = std::function<Jet(const Jet&, const Jet&)>;

struct JetField {
  JetFn x, y;
};

/// Evaluate a jet component at a point (zero jet when unset).
Jet eval_jet(const JetFn& f, const Vec2& p);

/// Plain value of a jet vector field at a point.
Vec2 eval_field(const JetField& f, const Vec2& p);

/// A closed-form solution octet of the coupled optimal-control system:
/// state velocity/pressure and rescaled-adjoint velocity/pressure on both
/// subdomains, with the physical parameters they are meant to run under.
/// Fields assume the canonical layout: free-flow box above the porous box,
/// horizontal interface with free-flow-side normal (0,-1).
struct ExactFields {
  double mu = 1.0;
  double alpha1 = 1.0;
  double alpha = 1.0;
  std::function<Mat2(const Vec2&)> K;  // empty = identity

  JetField u_s, u_d;  // state velocity
  JetFn p_s, p_d;     // state pressure
  JetField z_s, z_d;  // rescaled adjoint velocity
  JetFn r_s, r_d;     // adjoint pressure
};

/// Shipped smooth trigonometric octet: stream-function free-flow velocities
/// (solenoidal, zero normal trace on the outer free-flow boundary), generic
/// low-frequency porous fields; every interface residual is nonzero.
ExactFields trig_octet();

/// Octet lying exactly in the discrete spaces: [P2]^2 free-flow velocities,
/// RT-representable porous velocities, affine pressures, constant
/// anisotropic permeability.
ExactFields polynomial_octet();

/// All fields zero.
ExactFields zero_octet();

/// The compactly supported free-flow pressure bump
///   x^2 (1-x)^2 (y-1)^2 (2-y)^2
/// used for the pressure-robustness contrast.
JetFn pressure_bump();

/// Returns a copy of `base` with p_s replaced by p_s + lambda * phi. When
/// phi is compactly supported in the free-flow box, only the free-flow
/// momentum source of the derived data changes; velocities, divergence
/// data, interface residuals, and boundary data are untouched.
ExactFields add_pressure_perturbation(const ExactFields& base,
                                      const JetFn& phi, double lambda);

/// add_pressure_perturbation with the built-in quartic bump profile.
ExactFields add_pressure_bump(const ExactFields& base, double lambda);

/// Returns a copy of `base` with every solution field multiplied by
/// `factor` (parameters untouched). The derived data and the discrete
/// solution scale by the same factor, so discretization errors do too:
/// handy for experiments that need a small but nonzero baseline error.
ExactFields scale_octet(const ExactFields& base, double factor);

/// Source, target, divergence, interface-residual, and boundary data of the
/// strong optimality system at the octet (the interface residuals follow the
/// stress-unit conventions documented with ProblemData).
ProblemData derive_data(const ExactFields& exact);

/// Largest entry, over free test dofs, of each block row of the weak
/// optimality system evaluated on the exact fields with the derived data,
/// using an independent composite quadrature (no assembly code involved).
/// The interface multipliers are taken as the exact traces: lambda = p_d on
/// the state side, lambda_z = r_d on the adjoint side.
struct WeakResidual {
  double state_velocity = 0.0;
  double adjoint_velocity = 0.0;
  double state_divergence = 0.0;
  double adjoint_divergence = 0.0;
  double state_flux = 0.0;
  double adjoint_flux = 0.0;
  double max_abs() const;
};

WeakResidual weak_residual(const Mesh& mesh, const VelocityPair& vel,
                           const Space& pressure, const Space& trace,
                           const ExactFields& exact, int base_degree = 10,
                           int levels = 2);

/// Draw unit-norm coefficient vectors from the discretely admissible velocity
/// set: essential-boundary dofs zero, divergence form vanishing against every
/// pressure test function, and interface flux-matching rows vanishing against
/// every trace test function. Samples span the whole constraint kernel (the
/// coefficient combinations are dense-kernel based, seeded and reproducible).
std::vector<VecX> sample_admissible_fields(const Mesh& mesh,
                                           const VelocityPair& vel,
                                           const Space& pressure,
                                           const Space& trace, int count,
                                           unsigned seed);

/// Discretization errors of one solved optimality system against a
/// closed-form octet, measured in the norms the scheme is judged by:
/// the velocity errors split into free-flow H1 seminorm, porous L2 norm,
/// and porous divergence L2 norm, combined into the graph norm
///   ||v||_X^2 = |v^s|_{1,s}^2 + ||v^d||_d^2 + ||div v^d||_d^2,
/// plus mean-adjusted L2 pressure errors and the value of the cost.
struct ErrorRow {
  double h = 0.0;  // mesh size of the level the row was computed on
  double u_grad_s = 0.0, u_l2_d = 0.0, u_div_d = 0.0, u_x = 0.0;
  double z_grad_s = 0.0, z_l2_d = 0.0, z_div_d = 0.0, z_x = 0.0;
  double p_l2 = 0.0, r_l2 = 0.0;
  double cost = 0.0;
};

/// Compare a discrete solution against the exact octet on the mesh it was
/// solved on. Exact pressures are shifted to zero mean over the whole domain
/// (evaluated with the same quadrature) before comparison, matching the
/// zero-mean normalization of the discrete pressures.
ErrorRow error_norms(const Mesh& mesh, const VelocityPair& vel,
                     const Space& pressure, const Solution& sol,
                     const ExactFields& exact, SchemeTag scheme,
                     const ReconstructionOperator* recon = nullptr,
                     int degree = 8);

/// Mesh-refinement history of the errors for one scheme: one row per level
/// (uniform refinement halves h between rows) and observed convergence
/// orders between consecutive levels, eoc = log2(e_level / e_level+1).
/// Orders are reported as quiet NaN when either error sits at solver
/// tolerance, where the quotient measures roundoff instead of a rate.
struct ConvergenceReport {
  SchemeTag scheme = SchemeTag::Classical;
  std::vector<ErrorRow> rows;
  std::vector<double> eoc_u, eoc_z, eoc_p, eoc_r;  // size rows.size()-1
};

/// Solve the optimality system on a hierarchy of uniformly refined meshes
/// and collect the error history. Requires at least three levels so that at
/// least two observed orders are available; fewer is an argument error.
/// A solver failure on any level is rethrown with the level number attached.
ConvergenceReport convergence_study(const Rect& stokes_box,
                                    const Rect& darcy_box, int n0, int levels,
                                    const ExactFields& exact, SchemeTag scheme);

/// One pressure-perturbation scale in a robustness experiment: the scale,
/// the graph-norm state-velocity errors of both schemes, and the Euclidean
/// distance of the reconstruction-scheme velocity coefficients from their
/// unperturbed baseline.
struct RobustnessRow {
  double lambda = 0.0;
  double classical_u_x = 0.0;
  double robust_u_x = 0.0;
  double robust_drift = 0.0;
};

/// Velocity-error response of both schemes to a pressure perturbation
/// p^s -> p^s + lambda*phi that leaves the exact velocity untouched (only
/// the free-flow momentum source changes, by lambda*grad(phi)). Baselines
/// are the lambda = 0 errors; one row is produced per requested scale.
struct RobustnessReport {
  double baseline_classical = 0.0;
  double baseline_robust = 0.0;
  std::vector<RobustnessRow> rows;
};

/// Run the perturbation experiment on one mesh (n0 cells per unit length,
/// then `refinements` uniform refinements). The perturbation profile must
/// be compactly supported inside the free-flow box: a profile whose value
/// or gradient is nonzero on the free-flow boundary (interface included)
/// is rejected as an argument error.
RobustnessReport robustness_experiment(const Rect& stokes_box,
                                       const Rect& darcy_box, int n0,
                                       int refinements,
                                       const ExactFields& exact,
                                       const JetFn& phi,
                                       const std::vector<double>& scales);

/// Plain-text table writers: one CSV row per level / per scale, headers
/// first, full double precision.
void write_convergence_csv(const ConvergenceReport& report, std::ostream& out);
void write_robustness_csv(const RobustnessReport& report, std::ostream& out);

}  // namespace sdopt

#endif  // SDOPT_VERIFY_HPP
