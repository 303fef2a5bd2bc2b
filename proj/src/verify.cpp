#include "sdopt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "sdopt/fe_function.hpp"
#include "sdopt/quadrature.hpp"
#include "sdopt/reconstruction.hpp"

namespace sdopt {

double WeakResidual::max_abs() const {
  return std::max({state_velocity, adjoint_velocity, state_divergence,
                   adjoint_divergence, state_flux, adjoint_flux});
}

// Residuals of the continuous optimality system tested against every free
// discrete basis function, with all integrals done by composite high-order
// quadrature directly on the octet (no stiffness/load assembly involved, so
// this is an independent check of the derived data and of the sign and unit
// conventions of every pairing).
WeakResidual weak_residual(const Mesh& mesh, const VelocityPair& vel,
                           const Space& pressure, const Space& trace,
                           const ExactFields& exact, int base_degree,
                           int levels) {
  if (vel.stokes->mesh != &mesh || vel.darcy->mesh != &mesh ||
      pressure.mesh != &mesh || trace.mesh != &mesh) {
    throw ArgumentError("weak_residual: spaces built on a different mesh");
  }
  const ProblemData data = derive_data(exact);
  const auto tri_rule =
      composite_rule(make_quadrature(QuadDomain::Triangle, base_degree), levels);
  const auto edge_rule =
      composite_rule(make_quadrature(QuadDomain::Edge, base_degree), levels);

  const double mu = exact.mu;
  const double ainv = 1.0 / std::sqrt(exact.alpha);
  const int doff = vel.darcy_offset();

  VecX Rs = VecX::Zero(vel.ndof());   // state momentum rows
  VecX Ra = VecX::Zero(vel.ndof());   // adjoint momentum rows
  VecX Rp = VecX::Zero(pressure.ndof);  // state divergence rows
  VecX Rr = VecX::Zero(pressure.ndof);  // adjoint divergence rows
  VecX Rj = VecX::Zero(trace.ndof);   // state flux-matching rows
  VecX Rjz = VecX::Zero(trace.ndof);  // adjoint flux-matching rows

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry g = mesh.tri_geometry(t);
    const bool stokes = mesh.tri_subdomain[t] == Subdomain::Stokes;
    const auto& pd = pressure.cell_dofs[t];
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const Vec2 ref = tri_rule.points[q];
      const Vec2 x = Vec2(g.v0 + g.J * ref);
      const double w = tri_rule.weights[q] * g.det;
      const BasisEval pb = eval_basis(pressure, t, ref);
      if (stokes) {
        const Jet u1 = eval_jet(exact.u_s.x, x), u2 = eval_jet(exact.u_s.y, x);
        const Jet z1 = eval_jet(exact.z_s.x, x), z2 = eval_jet(exact.z_s.y, x);
        const double pval = eval_jet(exact.p_s, x).v;
        const double rval = eval_jet(exact.r_s, x).v;
        Mat2 Du, Dz;
        Du << u1.dx, 0.5 * (u1.dy + u2.dx), 0.5 * (u1.dy + u2.dx), u2.dy;
        Dz << z1.dx, 0.5 * (z1.dy + z2.dx), 0.5 * (z1.dy + z2.dx), z2.dy;
        const Vec2 uval{u1.v, u2.v}, zval{z1.v, z2.v};
        const Vec2 fval = data.f_s ? data.f_s(x) : Vec2{0, 0};
        const Vec2 ustar = data.u_star_s ? data.u_star_s(x) : Vec2{0, 0};
        const BasisEval eb = eval_basis(*vel.stokes, t, ref);
        const auto& cd = vel.stokes->cell_dofs[t];
        for (int i = 0; i < 7; ++i) {
          const Vec2 grad = eb.gradients.row(i);
          const double phi = eb.values(i, 0);
          for (int c = 0; c < 2; ++c) {
            // test ψ = φ_i e_c: D(u):D(ψ) = (row c of D(u))·∇φ_i,
            // div ψ = ∂_c φ_i.
            const double form_u = 2.0 * mu * Du.row(c).dot(grad) +
                                  ainv * zval[c] * phi - pval * grad[c];
            const double form_z = ainv * uval[c] * phi -
                                  2.0 * mu * Dz.row(c).dot(grad) +
                                  rval * grad[c];
            Rs[cd[2 * i + c]] += w * (form_u - fval[c] * phi);
            Ra[cd[2 * i + c]] += w * (form_z - ainv * ustar[c] * phi);
          }
        }
        const double divu = u1.dx + u2.dy, divz = z1.dx + z2.dy;
        const double gval = data.g_s ? data.g_s(x) : 0.0;
        const double gzval = data.gz_s ? data.gz_s(x) : 0.0;
        for (int i = 0; i < 3; ++i) {
          Rp[pd[i]] += w * pb.values(i, 0) * (gval - divu);
          Rr[pd[i]] += w * pb.values(i, 0) * (gzval - divz);
        }
      } else {
        const Mat2 Kinv = eval_permeability(data, x).inverse();
        const Vec2 uval = eval_field(exact.u_d, x);
        const Vec2 zval = eval_field(exact.z_d, x);
        const Jet pdj = eval_jet(exact.p_d, x);
        const Jet rdj = eval_jet(exact.r_d, x);
        const Vec2 fval = data.f_d ? data.f_d(x) : Vec2{0, 0};
        const Vec2 ustar = data.u_star_d ? data.u_star_d(x) : Vec2{0, 0};
        const BasisEval eb = eval_basis(*vel.darcy, t, ref);
        const auto& cd = vel.darcy->cell_dofs[t];
        for (int j = 0; j < 8; ++j) {
          const Vec2 psi = eb.values.row(j);
          const double dpsi = eb.divergence[j];
          const double form_u = mu * (Kinv * uval).dot(psi) +
                                ainv * zval.dot(psi) - pdj.v * dpsi;
          const double form_z = ainv * uval.dot(psi) -
                                mu * (Kinv * zval).dot(psi) + rdj.v * dpsi;
          Rs[doff + cd[j]] += w * (form_u - fval.dot(psi));
          Ra[doff + cd[j]] += w * (form_z - ainv * ustar.dot(psi));
        }
        const double divu = eval_jet(exact.u_d.x, x).dx +
                            eval_jet(exact.u_d.y, x).dy;
        const double divz = eval_jet(exact.z_d.x, x).dx +
                            eval_jet(exact.z_d.y, x).dy;
        const double gval = data.g_d ? data.g_d(x) : 0.0;
        const double gzval = data.gz_d ? data.gz_d(x) : 0.0;
        for (int i = 0; i < 3; ++i) {
          Rp[pd[i]] += w * pb.values(i, 0) * (gval - divu);
          Rr[pd[i]] += w * pb.values(i, 0) * (gzval - divz);
        }
      }
    }
  }

  for (const InterfaceEdge& ie : interface_edges(mesh)) {
    const double len = mesh.edge_length(ie.edge);
    const Vec2 n = ie.normal;
    const Vec2 tau = interface_tangent(n);
    const int k = trace.edge_trace_index[ie.edge];
    for (std::size_t q = 0; q < edge_rule.size(); ++q) {
      const double tpar = edge_rule.points[q].x();
      const double w = edge_rule.weights[q] * len;
      const Vec2 x = mesh.edge_point(ie.edge, tpar);
      const Mat2 K = eval_permeability(data, x);
      const double kappa = tau.dot(K * tau);
      const double bjs = exact.alpha1 * mu / std::sqrt(kappa);

      const Vec2 us = eval_field(exact.u_s, x), zs = eval_field(exact.z_s, x);
      const Vec2 ud = eval_field(exact.u_d, x), zd = eval_field(exact.z_d, x);
      // Multipliers realized by the octet: λ = p^d|Γ, λᶻ = r^d|Γ.
      const double lam = eval_jet(exact.p_d, x).v;
      const double lamz = eval_jet(exact.r_d, x).v;
      const double j2v = data.j2 ? data.j2(x) : 0.0;
      const double j3v = data.j3 ? data.j3(x) : 0.0;
      const double j2zv = data.j2z ? data.j2z(x) : 0.0;
      const double j3zv = data.j3z ? data.j3z(x) : 0.0;

      {  // free-flow-side test functions
        const Vec2 ref = mesh.ref_coords(ie.tri_s, x);
        const BasisEval eb = eval_basis(*vel.stokes, ie.tri_s, ref);
        const auto& cd = vel.stokes->cell_dofs[ie.tri_s];
        for (int i = 0; i < 7; ++i) {
          const double phi = eb.values(i, 0);
          for (int c = 0; c < 2; ++c) {
            const double psin = phi * n[c], psit = phi * tau[c];
            Rs[cd[2 * i + c]] +=
                w * (bjs * us.dot(tau) * psit + lam * psin - j2v * psin -
                     j3v * psit);
            Ra[cd[2 * i + c]] +=
                w * (-bjs * zs.dot(tau) * psit - lamz * psin + j2zv * psin +
                     j3zv * psit);
          }
        }
      }
      {  // porous-side test functions: ψ·n^d = −ψ·n
        const Vec2 ref = mesh.ref_coords(ie.tri_d, x);
        const BasisEval eb = eval_basis(*vel.darcy, ie.tri_d, ref);
        const auto& cd = vel.darcy->cell_dofs[ie.tri_d];
        for (int j = 0; j < 8; ++j) {
          const double psin = Vec2(eb.values.row(j)).dot(n);
          Rs[doff + cd[j]] += w * (-lam * psin);
          Ra[doff + cd[j]] += w * (lamz * psin);
        }
      }
      const double j0v = data.j0 ? data.j0(x) : 0.0;
      const double j0zv = data.j0z ? data.j0z(x) : 0.0;
      const double jump_u = us.dot(n) - ud.dot(n);
      const double jump_z = zs.dot(n) - zd.dot(n);
      const Vec2 chi = trace_basis(tpar);
      for (int i = 0; i < 2; ++i) {
        Rj[2 * k + i] += w * chi[i] * (jump_u - j0v);
        Rjz[2 * k + i] += w * chi[i] * (jump_z - j0zv);
      }
    }
  }

  WeakResidual res{};
  for (int i = 0; i < vel.stokes->ndof; ++i) {
    if (vel.stokes->boundary_dof[i]) continue;  // not an equation row
    res.state_velocity = std::max(res.state_velocity, std::abs(Rs[i]));
    res.adjoint_velocity = std::max(res.adjoint_velocity, std::abs(Ra[i]));
  }
  for (int i = 0; i < vel.darcy->ndof; ++i) {
    if (vel.darcy->boundary_dof[i]) continue;
    res.state_velocity = std::max(res.state_velocity, std::abs(Rs[doff + i]));
    res.adjoint_velocity =
        std::max(res.adjoint_velocity, std::abs(Ra[doff + i]));
  }
  res.state_divergence = Rp.cwiseAbs().maxCoeff();
  res.adjoint_divergence = Rr.cwiseAbs().maxCoeff();
  res.state_flux = Rj.cwiseAbs().maxCoeff();
  res.adjoint_flux = Rjz.cwiseAbs().maxCoeff();
  return res;
}

std::vector<VecX> sample_admissible_fields(const Mesh& mesh,
                                           const VelocityPair& vel,
                                           const Space& pressure,
                                           const Space& trace, int count,
                                           unsigned seed) {
  if (count < 0) throw ArgumentError("sample_admissible_fields: count < 0");

  const SpMat B = assemble_b(mesh, vel, pressure);
  const SpMat C = assemble_interface_constraint(mesh, vel, trace);

  std::vector<int> free_dofs;
  free_dofs.reserve(vel.ndof());
  for (int i = 0; i < vel.stokes->ndof; ++i) {
    if (!vel.stokes->boundary_dof[i]) free_dofs.push_back(i);
  }
  for (int i = 0; i < vel.darcy->ndof; ++i) {
    if (!vel.darcy->boundary_dof[i]) {
      free_dofs.push_back(vel.darcy_offset() + i);
    }
  }

  const int nfree = static_cast<int>(free_dofs.size());
  MatX constraints(B.rows() + C.rows(), nfree);
  for (int j = 0; j < nfree; ++j) {
    constraints.col(j).head(B.rows()) = VecX(B.col(free_dofs[j]));
    constraints.col(j).tail(C.rows()) = VecX(C.col(free_dofs[j]));
  }

  Eigen::FullPivLU<MatX> lu(constraints);
  const MatX kernel = lu.kernel();
  if (kernel.cols() == 0 || lu.dimensionOfKernel() == 0) {
    throw SolverError("sample_admissible_fields: constraint kernel is empty");
  }

  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<VecX> samples;
  samples.reserve(count);
  while (static_cast<int>(samples.size()) < count) {
    VecX combo(kernel.cols());
    for (int k = 0; k < combo.size(); ++k) combo[k] = normal(gen);
    VecX vfree = kernel * combo;
    const double norm = vfree.norm();
    if (norm < 1e-12) continue;  // astronomically unlikely; redraw
    vfree /= norm;
    VecX v = VecX::Zero(vel.ndof());
    for (int j = 0; j < nfree; ++j) v[free_dofs[j]] = vfree[j];
    samples.push_back(std::move(v));
  }
  return samples;
}

ErrorRow error_norms(const Mesh& mesh, const VelocityPair& vel,
                     const Space& pressure, const Solution& sol,
                     const ExactFields& exact, SchemeTag scheme,
                     const ReconstructionOperator* recon, int degree) {
  if (vel.stokes->mesh != &mesh || vel.darcy->mesh != &mesh ||
      pressure.mesh != &mesh) {
    throw ArgumentError("error_norms: spaces built on a different mesh");
  }
  if (sol.u.size() != vel.ndof() || sol.z.size() != vel.ndof() ||
      sol.p.size() != pressure.ndof || sol.r.size() != pressure.ndof) {
    throw ArgumentError("error_norms: solution sizes do not match the spaces");
  }
  const auto rule = make_quadrature(QuadDomain::Triangle, degree);
  const int doff = vel.darcy_offset();
  const FeFunction us_h{vel.stokes, sol.u.head(doff)};
  const FeFunction ud_h{vel.darcy, sol.u.tail(vel.darcy->ndof)};
  const FeFunction zs_h{vel.stokes, sol.z.head(doff)};
  const FeFunction zd_h{vel.darcy, sol.z.tail(vel.darcy->ndof)};
  const FeFunction p_h{&pressure, sol.p};
  const FeFunction r_h{&pressure, sol.r};

  // Exact pressures enter mean-free: shift both by their quadrature mean
  // over the whole domain, matching the discrete zero-mean normalization.
  double area = 0.0, int_p = 0.0, int_r = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry g = mesh.tri_geometry(t);
    const bool stokes = mesh.tri_subdomain[t] == Subdomain::Stokes;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = Vec2(g.v0 + g.J * rule.points[q]);
      const double w = rule.weights[q] * g.det;
      area += w;
      int_p += w * eval_jet(stokes ? exact.p_s : exact.p_d, x).v;
      int_r += w * eval_jet(stokes ? exact.r_s : exact.r_d, x).v;
    }
  }
  const double mean_p = int_p / area;
  const double mean_r = int_r / area;

  ErrorRow row;
  row.h = mesh.h;
  double ug = 0, ul = 0, udv = 0, zg = 0, zl = 0, zdv = 0, pe = 0, re = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry g = mesh.tri_geometry(t);
    const bool stokes = mesh.tri_subdomain[t] == Subdomain::Stokes;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 ref = rule.points[q];
      const Vec2 x = Vec2(g.v0 + g.J * ref);
      const double w = rule.weights[q] * g.det;
      if (stokes) {
        const Jet u1 = eval_jet(exact.u_s.x, x), u2 = eval_jet(exact.u_s.y, x);
        const Jet z1 = eval_jet(exact.z_s.x, x), z2 = eval_jet(exact.z_s.y, x);
        Mat2 Gu, Gz;
        Gu << u1.dx, u1.dy, u2.dx, u2.dy;
        Gz << z1.dx, z1.dy, z2.dx, z2.dy;
        ug += w * (eval_gradient(us_h, t, ref) - Gu).squaredNorm();
        zg += w * (eval_gradient(zs_h, t, ref) - Gz).squaredNorm();
        const double pex = eval_jet(exact.p_s, x).v - mean_p;
        const double rex = eval_jet(exact.r_s, x).v - mean_r;
        pe += w * std::pow(eval_scalar(p_h, t, ref) - pex, 2);
        re += w * std::pow(eval_scalar(r_h, t, ref) - rex, 2);
      } else {
        const Jet u1 = eval_jet(exact.u_d.x, x), u2 = eval_jet(exact.u_d.y, x);
        const Jet z1 = eval_jet(exact.z_d.x, x), z2 = eval_jet(exact.z_d.y, x);
        ul += w * (eval_velocity(ud_h, t, ref) - Vec2{u1.v, u2.v}).squaredNorm();
        zl += w * (eval_velocity(zd_h, t, ref) - Vec2{z1.v, z2.v}).squaredNorm();
        udv += w * std::pow(eval_divergence(ud_h, t, ref) - (u1.dx + u2.dy), 2);
        zdv += w * std::pow(eval_divergence(zd_h, t, ref) - (z1.dx + z2.dy), 2);
        const double pex = eval_jet(exact.p_d, x).v - mean_p;
        const double rex = eval_jet(exact.r_d, x).v - mean_r;
        pe += w * std::pow(eval_scalar(p_h, t, ref) - pex, 2);
        re += w * std::pow(eval_scalar(r_h, t, ref) - rex, 2);
      }
    }
  }
  row.u_grad_s = std::sqrt(ug);
  row.u_l2_d = std::sqrt(ul);
  row.u_div_d = std::sqrt(udv);
  row.u_x = std::sqrt(ug + ul + udv);
  row.z_grad_s = std::sqrt(zg);
  row.z_l2_d = std::sqrt(zl);
  row.z_div_d = std::sqrt(zdv);
  row.z_x = std::sqrt(zg + zl + zdv);
  row.p_l2 = std::sqrt(pe);
  row.r_l2 = std::sqrt(re);
  row.cost =
      evaluate_cost(mesh, vel, derive_data(exact), sol, scheme, recon);
  return row;
}

namespace {

// log2 error quotient under mesh halving; NaN once either error sits at
// solver tolerance, where the quotient measures roundoff instead of a rate.
double observed_order(double coarse, double fine) {
  if (!(coarse > 1e-11) || !(fine > 1e-11)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::log2(coarse / fine);
}

}  // namespace

ConvergenceReport convergence_study(const Rect& stokes_box,
                                    const Rect& darcy_box, int n0, int levels,
                                    const ExactFields& exact,
                                    SchemeTag scheme) {
  if (n0 < 1) throw ArgumentError("convergence_study: n0 must be positive");
  if (levels < 3) {
    throw ArgumentError(
        "convergence_study: need at least three levels for two observed "
        "orders");
  }
  const ProblemData data = derive_data(exact);
  ConvergenceReport report;
  report.scheme = scheme;
  Mesh mesh = build_two_domain_mesh(stokes_box, darcy_box, n0);
  for (int level = 0; level < levels; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    const Space stokes = make_space(mesh, SpaceKind::StokesVelocity);
    const Space darcy = make_space(mesh, SpaceKind::DarcyVelocity);
    const Space pressure = make_space(mesh, SpaceKind::Pressure);
    const Space trace = make_space(mesh, SpaceKind::InterfaceTrace);
    const VelocityPair vel{&stokes, &darcy};
    ReconstructionOperator recon;
    const ReconstructionOperator* rp = nullptr;
    if (scheme == SchemeTag::Robust) {
      recon = build_reconstruction(mesh, vel);
      rp = &recon;
    }
    const BlockSystem sys =
        build_system(mesh, vel, pressure, trace, data, scheme, rp);
    Solution sol;
    try {
      sol = solve(sys);
    } catch (const SolverError& err) {
      throw SolverError("level " + std::to_string(level) + ": " + err.what());
    }
    report.rows.push_back(
        error_norms(mesh, vel, pressure, sol, exact, scheme, rp));
  }
  for (std::size_t l = 0; l + 1 < report.rows.size(); ++l) {
    const ErrorRow& c = report.rows[l];
    const ErrorRow& f = report.rows[l + 1];
    report.eoc_u.push_back(observed_order(c.u_x, f.u_x));
    report.eoc_z.push_back(observed_order(c.z_x, f.z_x));
    report.eoc_p.push_back(observed_order(c.p_l2, f.p_l2));
    report.eoc_r.push_back(observed_order(c.r_l2, f.r_l2));
  }
  return report;
}

RobustnessReport robustness_experiment(const Rect& stokes_box,
                                       const Rect& darcy_box, int n0,
                                       int refinements,
                                       const ExactFields& exact,
                                       const JetFn& phi,
                                       const std::vector<double>& scales) {
  if (n0 < 1) {
    throw ArgumentError("robustness_experiment: n0 must be positive");
  }
  if (refinements < 0) {
    throw ArgumentError("robustness_experiment: negative refinement count");
  }
  if (!phi) {
    throw ArgumentError("robustness_experiment: empty perturbation profile");
  }
  // The perturbation must not reach the free-flow boundary (interface
  // included): sample value and gradient along all four box sides.
  const int ns = 64;
  for (int i = 0; i <= ns; ++i) {
    const double s = static_cast<double>(i) / ns;
    const double xs = stokes_box.x0 + s * stokes_box.width();
    const double ys = stokes_box.y0 + s * stokes_box.height();
    const Vec2 probes[4] = {{xs, stokes_box.y0},
                            {xs, stokes_box.y1},
                            {stokes_box.x0, ys},
                            {stokes_box.x1, ys}};
    for (const Vec2& p : probes) {
      const Jet v = eval_jet(phi, p);
      if (std::max({std::abs(v.v), std::abs(v.dx), std::abs(v.dy)}) > 1e-12) {
        throw ArgumentError(
            "robustness_experiment: perturbation profile is not compactly "
            "supported in the free-flow box");
      }
    }
  }

  Mesh mesh = build_two_domain_mesh(stokes_box, darcy_box, n0);
  for (int r = 0; r < refinements; ++r) mesh = refine_uniform(mesh);
  const Space stokes = make_space(mesh, SpaceKind::StokesVelocity);
  const Space darcy = make_space(mesh, SpaceKind::DarcyVelocity);
  const Space pressure = make_space(mesh, SpaceKind::Pressure);
  const Space trace = make_space(mesh, SpaceKind::InterfaceTrace);
  const VelocityPair vel{&stokes, &darcy};
  const ReconstructionOperator recon = build_reconstruction(mesh, vel);

  const auto run = [&](double lambda, SchemeTag scheme) {
    const ExactFields pert = add_pressure_perturbation(exact, phi, lambda);
    const ProblemData data = derive_data(pert);
    const ReconstructionOperator* rp =
        scheme == SchemeTag::Robust ? &recon : nullptr;
    const BlockSystem sys =
        build_system(mesh, vel, pressure, trace, data, scheme, rp);
    const Solution sol = solve(sys);
    const ErrorRow row = error_norms(mesh, vel, pressure, sol, pert, scheme, rp);
    return std::pair<Solution, ErrorRow>(sol, row);
  };

  const ErrorRow row_c0 = run(0.0, SchemeTag::Classical).second;
  const auto [sol_r0, row_r0] = run(0.0, SchemeTag::Robust);
  RobustnessReport report;
  report.baseline_classical = row_c0.u_x;
  report.baseline_robust = row_r0.u_x;
  for (const double lambda : scales) {
    RobustnessRow row;
    row.lambda = lambda;
    if (lambda == 0.0) {
      row.classical_u_x = row_c0.u_x;
      row.robust_u_x = row_r0.u_x;
      row.robust_drift = 0.0;
    } else {
      row.classical_u_x = run(lambda, SchemeTag::Classical).second.u_x;
      const auto [sol_r, row_r] = run(lambda, SchemeTag::Robust);
      row.robust_u_x = row_r.u_x;
      row.robust_drift = (sol_r.u - sol_r0.u).norm();
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_convergence_csv(const ConvergenceReport& report,
                           std::ostream& out) {
  out << "level,h,u_grad_s,u_l2_d,u_div_d,u_x,z_grad_s,z_l2_d,z_div_d,z_x,"
         "p_l2,r_l2,cost,eoc_u,eoc_z,eoc_p,eoc_r\n";
  out << std::setprecision(17);
  for (std::size_t l = 0; l < report.rows.size(); ++l) {
    const ErrorRow& r = report.rows[l];
    out << l << ',' << r.h << ',' << r.u_grad_s << ',' << r.u_l2_d << ','
        << r.u_div_d << ',' << r.u_x << ',' << r.z_grad_s << ',' << r.z_l2_d
        << ',' << r.z_div_d << ',' << r.z_x << ',' << r.p_l2 << ',' << r.r_l2
        << ',' << r.cost;
    if (l == 0) {
      out << ",,,,\n";
    } else {
      out << ',' << report.eoc_u[l - 1] << ',' << report.eoc_z[l - 1] << ','
          << report.eoc_p[l - 1] << ',' << report.eoc_r[l - 1] << '\n';
    }
  }
}

void write_robustness_csv(const RobustnessReport& report, std::ostream& out) {
  out << "lambda,classical_u_x,robust_u_x,classical_ratio,robust_rel_change,"
         "robust_drift\n";
  out << std::setprecision(17);
  for (const RobustnessRow& r : report.rows) {
    const double ratio = report.baseline_classical > 0.0
                             ? r.classical_u_x / report.baseline_classical
                             : std::numeric_limits<double>::quiet_NaN();
    const double rel = report.baseline_robust > 0.0
                           ? std::abs(r.robust_u_x - report.baseline_robust) /
                                 report.baseline_robust
                           : std::numeric_limits<double>::quiet_NaN();
    out << r.lambda << ',' << r.classical_u_x << ',' << r.robust_u_x << ','
        << ratio << ',' << rel << ',' << r.robust_drift << '\n';
  }
}

}  // namespace sdopt
