#include "sdopt/reconstruction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "sdopt/quadrature.hpp"

namespace sdopt {

ReconstructionOperator build_reconstruction(const Mesh& mesh,
                                            const VelocityPair& vel) {
  ReconstructionOperator R;
  R.rt_stokes = make_space(mesh, SpaceKind::DarcyVelocity, Subdomain::Stokes);
  R.darcy = vel.darcy;
  R.y_ndof = R.rt_stokes.ndof + vel.darcy->ndof;

  std::vector<Triplet> trips;

  // Porous block: the physical space is already the RT target.
  const int yoff = R.rt_stokes.ndof;
  const int voff = vel.darcy_offset();
  for (int i = 0; i < vel.darcy->ndof; ++i) {
    trips.emplace_back(yoff + i, voff + i, 1.0);
  }

  // Free-flow block: each continuous basis function is assigned, per
  // triangle, the RT field with identical edge normal moments and interior
  // averages. The RT dof values are exactly those moments (the RT basis is
  // dual to its functionals). A shared edge receives identical moment values
  // from both incident triangles because the velocity trace is continuous,
  // so only the owning triangle writes its two edge rows.
  const auto edge_rule = make_quadrature(QuadDomain::Edge, 5);
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, 4);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (vel.stokes->cell_dofs[t].empty()) continue;
    const TriGeometry g = mesh.tri_geometry(t);
    MatX local = MatX::Zero(8, 14);
    for (int i = 0; i < 3; ++i) {
      const int e = mesh.tri_edges[t][i];
      if (mesh.edge_tris[e][0] != t) continue;  // owner writes the edge rows
      const Vec2 n = mesh.edge_normal[e];
      const double len = mesh.edge_length(e);
      for (std::size_t q = 0; q < edge_rule.size(); ++q) {
        const double tt = edge_rule.points[q].x();
        const Vec2 x = mesh.edge_point(e, tt);
        const BasisEval eb =
            eval_basis(*vel.stokes, t, mesh.ref_coords(t, x));
        const double w = edge_rule.weights[q] * len;
        for (int j = 0; j < 7; ++j) {
          for (int c = 0; c < 2; ++c) {
            const double vn = eb.values(j, 0) * n[c];
            local(2 * i, 2 * j + c) += w * (1.0 - tt) * vn;
            local(2 * i + 1, 2 * j + c) += w * tt * vn;
          }
        }
      }
    }
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const BasisEval eb = eval_basis(*vel.stokes, t, tri_rule.points[q]);
      const double w = tri_rule.weights[q] * g.det;
      for (int j = 0; j < 7; ++j) {
        for (int c = 0; c < 2; ++c) {
          local(6 + c, 2 * j + c) += w * eb.values(j, 0);
        }
      }
    }
    const auto& yd = R.rt_stokes.cell_dofs[t];
    const auto& vd = vel.stokes->cell_dofs[t];
    for (int k = 0; k < 8; ++k) {
      if (k < 6 && mesh.edge_tris[mesh.tri_edges[t][k / 2]][0] != t) continue;
      for (int j = 0; j < 14; ++j) {
        if (local(k, j) != 0.0) {
          trips.emplace_back(yd[k], vd[j], local(k, j));
        }
      }
    }
  }

  R.Pi.resize(R.y_ndof, vel.ndof());
  R.Pi.setFromTriplets(trips.begin(), trips.end());
  return R;
}

FeFunction rt_interpolate(const Space& rt,
                          const std::function<Vec2(const Vec2&)>& field,
                          int edge_degree, int tri_degree) {
  if (rt.kind != SpaceKind::DarcyVelocity) {
    throw ArgumentError("rt_interpolate: target space is not RT1");
  }
  const Mesh& mesh = *rt.mesh;
  FeFunction f{&rt, VecX::Zero(rt.ndof)};
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (rt.rt_edge_dof[e] < 0) continue;
    const Vec2 mom = edge_normal_moments(mesh, e, field, edge_degree);
    f.coeffs[rt.rt_edge_dof[e]] = mom.x();
    f.coeffs[rt.rt_edge_dof[e] + 1] = mom.y();
  }
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (rt.rt_tri_dof[t] < 0) continue;
    const TriGeometry g = mesh.tri_geometry(t);
    Vec2 avg = Vec2::Zero();
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      avg += tri_rule.weights[q] * g.det *
             field(g.v0 + g.J * tri_rule.points[q]);
    }
    f.coeffs[rt.rt_tri_dof[t]] = avg.x();
    f.coeffs[rt.rt_tri_dof[t] + 1] = avg.y();
  }
  return f;
}

double consistency_functional(const FeFunction& psi_s, const FeFunction& psi_d,
                              const std::function<double(const Vec2&)>& phi_s,
                              const std::function<double(const Vec2&)>& phi_d,
                              int tri_degree, int edge_degree) {
  if (psi_s.space->mesh != psi_d.space->mesh) {
    throw ArgumentError("consistency_functional: fields on different meshes");
  }
  const Mesh& mesh = *psi_s.space->mesh;
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  double v = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const bool on_s = !psi_s.space->cell_dofs[t].empty();
    const bool on_d = !psi_d.space->cell_dofs[t].empty();
    if (!on_s && !on_d) continue;
    const FeFunction& psi = on_s ? psi_s : psi_d;
    const auto& phi = on_s ? phi_s : phi_d;
    if (!phi) continue;
    const TriGeometry g = mesh.tri_geometry(t);
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const Vec2 ref = tri_rule.points[q];
      v -= tri_rule.weights[q] * g.det * eval_divergence(psi, t, ref) *
           phi(g.v0 + g.J * ref);
    }
  }
  if (phi_d) {
    const auto edge_rule = make_quadrature(QuadDomain::Edge, edge_degree);
    for (const InterfaceEdge& ie : interface_edges(mesh)) {
      const double len = mesh.edge_length(ie.edge);
      for (std::size_t q = 0; q < edge_rule.size(); ++q) {
        const Vec2 x = mesh.edge_point(ie.edge, edge_rule.points[q].x());
        const double jump =
            eval_velocity(psi_s, ie.tri_s, mesh.ref_coords(ie.tri_s, x))
                .dot(ie.normal) -
            eval_velocity(psi_d, ie.tri_d, mesh.ref_coords(ie.tri_d, x))
                .dot(ie.normal);
        v -= edge_rule.weights[q] * len * jump * phi_d(x);
      }
    }
  }
  return v;
}

VecX interpolate_velocity(const Mesh& mesh, const VelocityPair& vel,
                          const std::function<Vec2(const Vec2&)>& field_s,
                          const std::function<Vec2(const Vec2&)>& field_d,
                          int edge_degree, int tri_degree) {
  if (vel.stokes->mesh != &mesh || vel.darcy->mesh != &mesh) {
    throw ArgumentError("interpolate_velocity: spaces built on another mesh");
  }
  VecX coeffs = VecX::Zero(vel.ndof());
  if (field_s) {
    for (int i = 0; i < vel.stokes->num_nodes; ++i) {
      const Vec2 value = field_s(vel.stokes->node_pos[i]);
      coeffs[2 * i] = value.x();
      coeffs[2 * i + 1] = value.y();
    }
  }
  if (field_d) {
    const FeFunction fd =
        rt_interpolate(*vel.darcy, field_d, edge_degree, tri_degree);
    coeffs.segment(vel.darcy_offset(), vel.darcy->ndof) = fd.coeffs;
  }
  return coeffs;
}

namespace {

// Reference sample set that bounds any linear function on the triangle.
const std::array<Vec2, 7> kTriSamples = {
    Vec2{0.0, 0.0}, Vec2{1.0, 0.0},         Vec2{0.0, 1.0},  Vec2{0.5, 0.0},
    Vec2{0.0, 0.5}, Vec2{0.5, 0.5},         Vec2{1.0 / 3.0, 1.0 / 3.0}};

}  // namespace

double max_cell_divergence(const ReconstructionOperator& op, const VecX& y) {
  if (y.size() != op.y_ndof) {
    throw ArgumentError("max_cell_divergence: coefficient size mismatch");
  }
  const Mesh& mesh = *op.darcy->mesh;
  double worst = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const bool on_s = !op.rt_stokes.cell_dofs[t].empty();
    const Space& space = on_s ? op.rt_stokes : *op.darcy;
    const int offset = on_s ? 0 : op.y_darcy_offset();
    const auto& cd = space.cell_dofs[t];
    for (const Vec2& ref : kTriSamples) {
      const BasisEval basis = eval_basis(space, t, ref);
      double div = 0.0;
      for (std::size_t j = 0; j < cd.size(); ++j) {
        div += y[offset + cd[j]] * basis.divergence[j];
      }
      worst = std::max(worst, std::abs(div));
    }
  }
  return worst;
}

double max_interface_normal_jump(const ReconstructionOperator& op,
                                 const VecX& y) {
  if (y.size() != op.y_ndof) {
    throw ArgumentError("max_interface_normal_jump: coefficient size mismatch");
  }
  const Mesh& mesh = *op.darcy->mesh;
  const int off_d = op.y_darcy_offset();
  double worst = 0.0;
  for (const InterfaceEdge& ie : interface_edges(mesh)) {
    for (const double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const Vec2 x = mesh.edge_point(ie.edge, t);
      Vec2 ws = Vec2::Zero(), wd = Vec2::Zero();
      const BasisEval bs =
          eval_basis(op.rt_stokes, ie.tri_s, mesh.ref_coords(ie.tri_s, x));
      for (std::size_t j = 0; j < op.rt_stokes.cell_dofs[ie.tri_s].size();
           ++j) {
        ws += y[op.rt_stokes.cell_dofs[ie.tri_s][j]] * bs.values.row(j);
      }
      const BasisEval bd =
          eval_basis(*op.darcy, ie.tri_d, mesh.ref_coords(ie.tri_d, x));
      for (std::size_t j = 0; j < op.darcy->cell_dofs[ie.tri_d].size(); ++j) {
        wd += y[off_d + op.darcy->cell_dofs[ie.tri_d][j]] * bd.values.row(j);
      }
      worst = std::max(worst, std::abs((ws - wd).dot(ie.normal)));
    }
  }
  return worst;
}

}  // namespace sdopt
