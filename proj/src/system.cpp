#include "sdopt/system.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseLU>

#include "sdopt/fe_function.hpp"
#include "sdopt/quadrature.hpp"

namespace sdopt {

namespace {

void require_scheme_inputs(const VelocityPair& vel, const ProblemData& data,
                           SchemeTag scheme,
                           const ReconstructionOperator* recon) {
  if (!(data.alpha > 0.0)) {
    throw ArgumentError("system: regularization weight must be positive");
  }
  if (scheme == SchemeTag::Robust) {
    if (recon == nullptr) {
      throw ArgumentError("system: robust scheme requires a reconstruction");
    }
    if (recon->Pi.cols() != vel.ndof()) {
      throw ArgumentError(
          "system: reconstruction does not match the velocity pair");
    }
  }
}

// Triplet accumulator for a block matrix with symmetric elimination: entries
// whose row or column is an eliminated dof are dropped (the diagonal of an
// eliminated dof is set to 1 at the end), and the full-column action on the
// prescribed values is subtracted from the RHS by the caller via a
// pre-elimination matrix-vector product.
struct BlockBuilder {
  int n;
  std::vector<Triplet> trips;

  explicit BlockBuilder(int size) : n(size) {}

  void add_sparse(int row_off, int col_off, const SpMat& m,
                  double scale = 1.0, bool transpose = false) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SpMat::InnerIterator it(m, k); it; ++it) {
        const int r = transpose ? static_cast<int>(it.col())
                                : static_cast<int>(it.row());
        const int c = transpose ? static_cast<int>(it.row())
                                : static_cast<int>(it.col());
        trips.emplace_back(row_off + r, col_off + c, scale * it.value());
      }
    }
  }

  void add_vector(int row_off, int col, const VecX& v, double scale = 1.0) {
    for (int i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) trips.emplace_back(row_off + i, col, scale * v[i]);
    }
  }

  void add_vector_t(int row, int col_off, const VecX& v, double scale = 1.0) {
    for (int i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) trips.emplace_back(row, col_off + i, scale * v[i]);
    }
  }

  SpMat full() const {
    SpMat m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  }

  SpMat reduced(const std::vector<std::uint8_t>& eliminated) const {
    std::vector<Triplet> kept;
    kept.reserve(trips.size() + n);
    for (const Triplet& t : trips) {
      if (!eliminated[t.row()] && !eliminated[t.col()]) kept.push_back(t);
    }
    for (int i = 0; i < n; ++i) {
      if (eliminated[i]) kept.emplace_back(i, i, 1.0);
    }
    SpMat m(n, n);
    m.setFromTriplets(kept.begin(), kept.end());
    return m;
  }
};

// Prescribed values of the flagged velocity dofs of one velocity pair:
// nodal interpolation on the free-flow side, edge normal moments on the
// porous side. Offsets are into the combined velocity numbering.
void essential_velocity_values(const Mesh& mesh, const VelocityPair& vel,
                               const std::function<Vec2(const Vec2&)>& bc_s,
                               const std::function<Vec2(const Vec2&)>& bc_d,
                               int block_off, VecX& values,
                               std::vector<std::uint8_t>& mask) {
  const Space& ss = *vel.stokes;
  for (int node = 0; node < ss.num_nodes; ++node) {
    for (int c = 0; c < 2; ++c) {
      const int dof = 2 * node + c;
      if (!ss.boundary_dof[dof]) continue;
      mask[block_off + dof] = 1;
      if (bc_s) values[block_off + dof] = bc_s(ss.node_pos[node])[c];
    }
  }
  const Space& sd = *vel.darcy;
  const int doff = block_off + vel.darcy_offset();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int d0 = sd.rt_edge_dof[e];
    if (d0 < 0 || !sd.boundary_dof[d0]) continue;
    mask[doff + d0] = 1;
    mask[doff + d0 + 1] = 1;
    if (bc_d) {
      const Vec2 m = edge_normal_moments(mesh, e, bc_d);
      values[doff + d0] = m[0];
      values[doff + d0 + 1] = m[1];
    }
  }
}

struct Factorized {
  Eigen::SparseLU<SpMat> lu;
  const SpMat* matrix;
};

// Factorize, solve, apply one iterative-refinement step and enforce the
// residual contract.
VecX direct_solve(const SpMat& A, const VecX& b, double& rel_residual) {
  Eigen::SparseLU<SpMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    throw SolverError("solve: sparse factorization failed (" +
                      lu.lastErrorMessage() + ")");
  }
  VecX x = lu.solve(b);
  x += lu.solve(VecX(b - A * x));
  const double bnorm = b.norm();
  const double rnorm = (A * x - b).norm();
  rel_residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
  if (!(rel_residual < 1e-10)) {
    throw SolverError("solve: residual contract violated, relative residual " +
                      std::to_string(rel_residual));
  }
  return x;
}

// ∫ |w_h − target|² over the pair's two subdomains, for coefficients in the
// combined numbering of (space_s, space_d at off_d).
double misfit_sq(const Mesh& mesh, const Space& space_s, const Space& space_d,
                 int off_d, const VecX& coeffs,
                 const std::function<Vec2(const Vec2&)>& target_s,
                 const std::function<Vec2(const Vec2&)>& target_d,
                 int tri_degree) {
  if (coeffs.size() != space_s.ndof + space_d.ndof) {
    throw ArgumentError("misfit: coefficient size does not match the pair");
  }
  const FeFunction fs{&space_s, coeffs.head(space_s.ndof)};
  const FeFunction fd{&space_d, coeffs.segment(off_d, space_d.ndof)};
  const auto rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const bool stokes = !space_s.cell_dofs[t].empty();
    if (stokes == space_d.cell_dofs[t].empty()) {
      // exactly one of the two spaces carries each triangle
      const TriGeometry g = mesh.tri_geometry(t);
      const FeFunction& f = stokes ? fs : fd;
      const auto& target = stokes ? target_s : target_d;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2 ref = rule.points[q];
        const Vec2 x = Vec2(g.v0 + g.J * ref);
        Vec2 diff = eval_velocity(f, t, ref);
        if (target) diff -= target(x);
        total += rule.weights[q] * g.det * diff.squaredNorm();
      }
    }
  }
  return total;
}

}  // namespace

BlockSystem build_system(const Mesh& mesh, const VelocityPair& vel,
                         const Space& pressure, const Space& trace,
                         const ProblemData& data, SchemeTag scheme,
                         const ReconstructionOperator* recon) {
  require_scheme_inputs(vel, data, scheme, recon);
  const bool robust = scheme == SchemeTag::Robust;
  const double ainv = 1.0 / std::sqrt(data.alpha);

  BlockSystem sys;
  sys.scheme = scheme;
  sys.nv = vel.ndof();
  sys.np = pressure.ndof;
  sys.nt = trace.ndof;

  const SpMat A = assemble_a(mesh, vel, data);
  const SpMat M = assemble_velocity_mass(
      mesh, vel, robust ? MassMode::PiWeighted : MassMode::Plain, recon);
  const SpMat B = assemble_b(mesh, vel, pressure);
  const SpMat C = assemble_interface_constraint(mesh, vel, trace);
  const VecX w = assemble_pressure_integral(mesh, pressure);

  const TestMode mode = robust ? TestMode::Reconstructed : TestMode::Plain;
  const VecX F1 = assemble_rhs(mesh, vel, data, RhsKind::State, mode, recon);
  const VecX F3 = assemble_rhs(mesh, vel, data, RhsKind::Adjoint, mode, recon);
  const VecX G = assemble_pressure_load(mesh, pressure, data.g_s, data.g_d);
  const VecX Gz =
      assemble_pressure_load(mesh, pressure, data.gz_s, data.gz_d);
  const VecX J1 = assemble_trace_load(mesh, trace, data.j0);
  const VecX J2 = assemble_trace_load(mesh, trace, data.j0z);

  BlockBuilder bb(sys.size());
  bb.add_sparse(sys.off_u(), sys.off_u(), A);
  bb.add_sparse(sys.off_u(), sys.off_z(), M, ainv);
  bb.add_sparse(sys.off_u(), sys.off_p(), B, 1.0, /*transpose=*/true);
  bb.add_sparse(sys.off_u(), sys.off_lu(), C, 1.0, /*transpose=*/true);
  bb.add_sparse(sys.off_z(), sys.off_u(), M, ainv);
  bb.add_sparse(sys.off_z(), sys.off_z(), A, -1.0);
  bb.add_sparse(sys.off_z(), sys.off_r(), B, -1.0, /*transpose=*/true);
  bb.add_sparse(sys.off_z(), sys.off_lz(), C, -1.0, /*transpose=*/true);
  bb.add_sparse(sys.off_p(), sys.off_u(), B);
  bb.add_vector(sys.off_p(), sys.off_mp(), w);
  bb.add_sparse(sys.off_r(), sys.off_z(), B, -1.0);
  bb.add_vector(sys.off_r(), sys.off_mr(), w, -1.0);
  bb.add_sparse(sys.off_lu(), sys.off_u(), C);
  bb.add_sparse(sys.off_lz(), sys.off_z(), C, -1.0);
  bb.add_vector_t(sys.off_mp(), sys.off_p(), w);
  bb.add_vector_t(sys.off_mr(), sys.off_r(), w, -1.0);

  VecX rhs = VecX::Zero(sys.size());
  rhs.segment(sys.off_u(), sys.nv) = F1;
  rhs.segment(sys.off_z(), sys.nv) = -F3;
  // Divergence data rows: b(u, q) = −(g, q) and, negated, b(z, q) = −(gᶻ, q).
  rhs.segment(sys.off_p(), sys.np) = -G;
  rhs.segment(sys.off_r(), sys.np) = Gz;
  rhs.segment(sys.off_lu(), sys.nt) = J1;
  rhs.segment(sys.off_lz(), sys.nt) = -J2;

  sys.essential = VecX::Zero(sys.size());
  sys.eliminated.assign(sys.size(), 0);
  essential_velocity_values(mesh, vel, data.bc_u_s, data.bc_u_d, sys.off_u(),
                            sys.essential, sys.eliminated);
  essential_velocity_values(mesh, vel, data.bc_z_s, data.bc_z_d, sys.off_z(),
                            sys.essential, sys.eliminated);

  rhs -= bb.full() * sys.essential;
  for (int i = 0; i < sys.size(); ++i) {
    if (sys.eliminated[i]) rhs[i] = sys.essential[i];
  }
  sys.matrix = bb.reduced(sys.eliminated);
  sys.rhs = std::move(rhs);

  if (robust) {
    sys.eta_map = SpMat(-ainv * recon->Pi);
  } else {
    SpMat id(sys.nv, sys.nv);
    id.setIdentity();
    sys.eta_map = SpMat(-ainv * id);
  }
  return sys;
}

Solution solve(const BlockSystem& sys) {
  Solution sol;
  const VecX x = direct_solve(sys.matrix, sys.rhs, sol.residual);
  sol.u = x.segment(sys.off_u(), sys.nv);
  sol.z = x.segment(sys.off_z(), sys.nv);
  sol.p = x.segment(sys.off_p(), sys.np);
  sol.r = x.segment(sys.off_r(), sys.np);
  sol.lambda_u = x.segment(sys.off_lu(), sys.nt);
  sol.lambda_z = x.segment(sys.off_lz(), sys.nt);
  sol.m_p = x[sys.off_mp()];
  sol.m_r = x[sys.off_mr()];
  sol.eta = sys.eta_map * sol.z;
  return sol;
}

VecX solve_state(const Mesh& mesh, const VelocityPair& vel,
                 const Space& pressure, const Space& trace,
                 const ProblemData& data, SchemeTag scheme,
                 const ReconstructionOperator* recon, const VecX& control) {
  require_scheme_inputs(vel, data, scheme, recon);
  const bool robust = scheme == SchemeTag::Robust;
  const int nv = vel.ndof(), np = pressure.ndof, nt = trace.ndof;
  const int n = nv + np + nt + 1;
  const int off_p = nv, off_l = nv + np, off_m = nv + np + nt;

  const SpMat A = assemble_a(mesh, vel, data);
  const SpMat B = assemble_b(mesh, vel, pressure);
  const SpMat C = assemble_interface_constraint(mesh, vel, trace);
  const VecX w = assemble_pressure_integral(mesh, pressure);
  const TestMode mode = robust ? TestMode::Reconstructed : TestMode::Plain;
  const VecX F1 = assemble_rhs(mesh, vel, data, RhsKind::State, mode, recon);
  const VecX G = assemble_pressure_load(mesh, pressure, data.g_s, data.g_d);
  const VecX J1 = assemble_trace_load(mesh, trace, data.j0);

  VecX control_load;
  if (robust) {
    if (control.size() != recon->y_ndof) {
      throw ArgumentError(
          "solve_state: control size does not match the target space");
    }
    const SpMat Ms = assemble_rt_mass(mesh, recon->rt_stokes);
    const SpMat Md = assemble_rt_mass(mesh, *recon->darcy);
    VecX my(recon->y_ndof);
    my.head(Ms.rows()) = Ms * control.head(Ms.cols());
    my.tail(Md.rows()) = Md * control.tail(Md.cols());
    control_load = recon->Pi.transpose() * my;
  } else {
    if (control.size() != nv) {
      throw ArgumentError(
          "solve_state: control size does not match the velocity pair");
    }
    control_load = assemble_velocity_mass(mesh, vel, MassMode::Plain) * control;
  }

  BlockBuilder bb(n);
  bb.add_sparse(0, 0, A);
  bb.add_sparse(0, off_p, B, 1.0, /*transpose=*/true);
  bb.add_sparse(0, off_l, C, 1.0, /*transpose=*/true);
  bb.add_sparse(off_p, 0, B);
  bb.add_vector(off_p, off_m, w);
  bb.add_sparse(off_l, 0, C);
  bb.add_vector_t(off_m, off_p, w);

  VecX rhs = VecX::Zero(n);
  rhs.head(nv) = F1 + control_load;
  rhs.segment(off_p, np) = -G;
  rhs.segment(off_l, nt) = J1;

  VecX essential = VecX::Zero(n);
  std::vector<std::uint8_t> eliminated(n, 0);
  essential_velocity_values(mesh, vel, data.bc_u_s, data.bc_u_d, 0, essential,
                            eliminated);
  rhs -= bb.full() * essential;
  for (int i = 0; i < n; ++i) {
    if (eliminated[i]) rhs[i] = essential[i];
  }

  double residual = 0.0;
  const VecX x = direct_solve(bb.reduced(eliminated), rhs, residual);
  return x.head(nv);
}

double tracking_term(const Mesh& mesh, const VelocityPair& vel,
                     const ProblemData& data, const VecX& u, SchemeTag scheme,
                     const ReconstructionOperator* recon, int tri_degree) {
  require_scheme_inputs(vel, data, scheme, recon);
  if (u.size() != vel.ndof()) {
    throw ArgumentError("tracking_term: coefficient size mismatch");
  }
  double value;
  if (scheme == SchemeTag::Robust) {
    const VecX y = recon->Pi * u;
    value = misfit_sq(mesh, recon->rt_stokes, *recon->darcy,
                      recon->y_darcy_offset(), y, data.u_star_s, data.u_star_d,
                      tri_degree);
  } else {
    value = misfit_sq(mesh, *vel.stokes, *vel.darcy, vel.darcy_offset(), u,
                      data.u_star_s, data.u_star_d, tri_degree);
  }
  return 0.5 * value;
}

double control_term(const Mesh& mesh, const VelocityPair& vel,
                    const ProblemData& data, const VecX& eta, SchemeTag scheme,
                    const ReconstructionOperator* recon, int tri_degree) {
  require_scheme_inputs(vel, data, scheme, recon);
  const bool robust = scheme == SchemeTag::Robust;
  if (!std::isfinite(data.alpha)) {
    return 0.0;  // infinite regularization admits only the zero control
  }
  const std::function<Vec2(const Vec2&)> none;
  const double norm_sq =
      robust ? misfit_sq(mesh, recon->rt_stokes, *recon->darcy,
                         recon->y_darcy_offset(), eta, none, none, tri_degree)
             : misfit_sq(mesh, *vel.stokes, *vel.darcy, vel.darcy_offset(),
                         eta, none, none, tri_degree);
  return 0.5 * data.alpha * norm_sq;
}

double evaluate_cost(const Mesh& mesh, const VelocityPair& vel,
                     const ProblemData& data, const Solution& sol,
                     SchemeTag scheme, const ReconstructionOperator* recon,
                     int tri_degree) {
  return tracking_term(mesh, vel, data, sol.u, scheme, recon, tri_degree) +
         control_term(mesh, vel, data, sol.eta, scheme, recon, tri_degree);
}

}  // namespace sdopt
