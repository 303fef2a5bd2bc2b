#include "sdopt/spaces.hpp"

#include <Eigen/LU>

#include "sdopt/quadrature.hpp"

namespace sdopt {

namespace {

EdgeTag outer_boundary_tag(Subdomain sub) {
  return sub == Subdomain::Stokes ? EdgeTag::GammaS : EdgeTag::GammaD;
}

void build_stokes(Space& s) {
  const Mesh& m = *s.mesh;
  s.vertex_node.assign(m.num_vertices(), -1);
  s.edge_node.assign(m.num_edges(), -1);
  s.center_node.assign(m.num_triangles(), -1);

  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.tri_subdomain[t] != Subdomain::Stokes) continue;
    for (int v : m.tri_vertices[t]) s.vertex_node[v] = 0;
    for (int e : m.tri_edges[t]) s.edge_node[e] = 0;
  }
  int next = 0;
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (s.vertex_node[v] == 0) {
      s.vertex_node[v] = next++;
      s.node_pos.push_back(m.vertices[v]);
    } else {
      s.vertex_node[v] = -1;
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    if (s.edge_node[e] == 0) {
      s.edge_node[e] = next++;
      s.node_pos.push_back(m.edge_point(e, 0.5));
    } else {
      s.edge_node[e] = -1;
    }
  }
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.tri_subdomain[t] != Subdomain::Stokes) continue;
    s.center_node[t] = next++;
    const auto& tv = m.tri_vertices[t];
    s.node_pos.push_back(
        (m.vertices[tv[0]] + m.vertices[tv[1]] + m.vertices[tv[2]]) / 3.0);
  }
  s.num_nodes = next;
  s.ndof = 2 * next;

  s.cell_dofs.assign(m.num_triangles(), {});
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.tri_subdomain[t] != Subdomain::Stokes) continue;
    std::vector<int> nodes(7);
    for (int i = 0; i < 3; ++i) nodes[i] = s.vertex_node[m.tri_vertices[t][i]];
    for (int i = 0; i < 3; ++i) nodes[3 + i] = s.edge_node[m.tri_edges[t][i]];
    nodes[6] = s.center_node[t];
    auto& cd = s.cell_dofs[t];
    cd.resize(14);
    for (int i = 0; i < 7; ++i) {
      cd[2 * i] = 2 * nodes[i];
      cd[2 * i + 1] = 2 * nodes[i] + 1;
    }
  }

  s.boundary_dof.assign(s.ndof, 0);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge_tag[e] != EdgeTag::GammaS) continue;
    for (int node : {s.vertex_node[m.edge_vertices[e][0]],
                     s.vertex_node[m.edge_vertices[e][1]], s.edge_node[e]}) {
      s.boundary_dof[2 * node] = 1;
      s.boundary_dof[2 * node + 1] = 1;
    }
  }
}

void build_pressure(Space& s) {
  const Mesh& m = *s.mesh;
  s.ndof = 3 * m.num_triangles();
  s.cell_dofs.assign(m.num_triangles(), {});
  for (int t = 0; t < m.num_triangles(); ++t) {
    s.cell_dofs[t] = {3 * t, 3 * t + 1, 3 * t + 2};
  }
  s.boundary_dof.assign(s.ndof, 0);
}

void build_darcy(Space& s) {
  const Mesh& m = *s.mesh;
  s.rt_edge_dof.assign(m.num_edges(), -1);
  s.rt_tri_dof.assign(m.num_triangles(), -1);
  s.rt_coeff.assign(m.num_triangles(), MatX());

  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.tri_subdomain[t] != s.subdomain) continue;
    for (int e : m.tri_edges[t]) s.rt_edge_dof[e] = 0;
  }
  int next = 0;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (s.rt_edge_dof[e] == 0) {
      s.rt_edge_dof[e] = next;
      next += 2;
    } else {
      s.rt_edge_dof[e] = -1;
    }
  }
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.tri_subdomain[t] != s.subdomain) continue;
    s.rt_tri_dof[t] = next;
    next += 2;
  }
  s.ndof = next;

  // Per-element nodal coefficients: invert the generalized Vandermonde of
  // the 8 global dof functionals applied to the Piola-mapped monomial frame.
  const auto edge_rule = make_quadrature(QuadDomain::Edge, 5);
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, 3);
  s.cell_dofs.assign(m.num_triangles(), {});
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.tri_subdomain[t] != s.subdomain) continue;
    const TriGeometry g = m.tri_geometry(t);
    MatX C = MatX::Zero(8, 8);
    MatX V;
    VecX dv;
    for (int i = 0; i < 3; ++i) {
      const int e = m.tri_edges[t][i];
      const Vec2 n = m.edge_normal[e];
      const double len = m.edge_length(e);
      for (std::size_t q = 0; q < edge_rule.size(); ++q) {
        const double tt = edge_rule.points[q].x();
        const Vec2 ref = m.ref_coords(t, m.edge_point(e, tt));
        rt_monomials(g, ref, V, dv);
        const VecX vn = V * n;
        const double w = edge_rule.weights[q] * len;
        C.row(2 * i) += w * (1.0 - tt) * vn.transpose();
        C.row(2 * i + 1) += w * tt * vn.transpose();
      }
    }
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      rt_monomials(g, tri_rule.points[q], V, dv);
      const double w = tri_rule.weights[q] * g.det;
      C.row(6) += w * V.col(0).transpose();
      C.row(7) += w * V.col(1).transpose();
    }
    Eigen::FullPivLU<MatX> lu(C);
    if (!lu.isInvertible()) {
      throw SolverError("make_space: RT element functionals are degenerate");
    }
    s.rt_coeff[t] = lu.inverse();

    auto& cd = s.cell_dofs[t];
    cd.resize(8);
    for (int i = 0; i < 3; ++i) {
      const int base = s.rt_edge_dof[m.tri_edges[t][i]];
      cd[2 * i] = base;
      cd[2 * i + 1] = base + 1;
    }
    cd[6] = s.rt_tri_dof[t];
    cd[7] = s.rt_tri_dof[t] + 1;
  }

  s.boundary_dof.assign(s.ndof, 0);
  const EdgeTag outer = outer_boundary_tag(s.subdomain);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge_tag[e] == outer && s.rt_edge_dof[e] >= 0) {
      s.boundary_dof[s.rt_edge_dof[e]] = 1;
      s.boundary_dof[s.rt_edge_dof[e] + 1] = 1;
    }
  }
}

void build_trace(Space& s) {
  const Mesh& m = *s.mesh;
  s.edge_trace_index.assign(m.num_edges(), -1);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge_tag[e] == EdgeTag::Interface) {
      s.edge_trace_index[e] = static_cast<int>(s.trace_edge.size());
      s.trace_edge.push_back(e);
    }
  }
  s.ndof = 2 * static_cast<int>(s.trace_edge.size());
  s.cell_dofs.assign(m.num_triangles(), {});
  s.boundary_dof.assign(s.ndof, 0);
}

}  // namespace

Space make_space(const Mesh& mesh, SpaceKind kind, Subdomain sub) {
  Space s;
  s.kind = kind;
  s.mesh = &mesh;
  s.subdomain = sub;
  switch (kind) {
    case SpaceKind::StokesVelocity: build_stokes(s); break;
    case SpaceKind::Pressure: build_pressure(s); break;
    case SpaceKind::DarcyVelocity: build_darcy(s); break;
    case SpaceKind::InterfaceTrace: build_trace(s); break;
  }
  return s;
}

void rt_monomials(const TriGeometry& g, const Vec2& ref, MatX& values,
                  VecX& divergence) {
  const double x = ref.x(), y = ref.y();
  MatX vhat(8, 2);
  vhat << 1, 0,
          0, 1,
          x, 0,
          y, 0,
          0, x,
          0, y,
          x * x, x * y,
          x * y, y * y;
  values = vhat * g.J.transpose() / g.det;
  divergence.resize(8);
  divergence << 0, 0, 1, 0, 0, 1, 3 * x, 3 * y;
  divergence /= g.det;
}

BasisEval eval_basis(const Space& s, int tri, const Vec2& ref) {
  if (s.kind == SpaceKind::InterfaceTrace) {
    throw ArgumentError("eval_basis: interface traces live on edges; "
                        "use trace_basis");
  }
  if (tri < 0 || tri >= s.mesh->num_triangles() ||
      s.cell_dofs[tri].empty()) {
    throw ArgumentError("eval_basis: triangle is not in the space's domain");
  }

  BasisEval out;
  const TriGeometry g = s.mesh->tri_geometry(tri);
  const double l1 = ref.x(), l2 = ref.y(), l0 = 1.0 - l1 - l2;

  if (s.kind == SpaceKind::Pressure) {
    out.values.resize(3, 1);
    out.values << l0, l1, l2;
    MatX gref(3, 2);
    gref << -1, -1, 1, 0, 0, 1;
    out.gradients = gref * g.JinvT.transpose();
    return out;
  }

  if (s.kind == SpaceKind::DarcyVelocity) {
    MatX V;
    VecX dv;
    rt_monomials(g, ref, V, dv);
    const MatX& N = s.rt_coeff[tri];
    out.values = N.transpose() * V;
    out.divergence = N.transpose() * dv;
    return out;
  }

  // StokesVelocity: barycentrics with the cubic bubble correction so that
  // the 7 node functions are a Lagrange basis for {vertices, midpoints,
  // centroid}.
  const double lam[3] = {l0, l1, l2};
  Eigen::Matrix<double, 3, 2> dlam;
  dlam << -1, -1, 1, 0, 0, 1;
  const double bub = 27.0 * l0 * l1 * l2;
  const Eigen::RowVector2d dbub =
      27.0 * (l1 * l2 * dlam.row(0) + l0 * l2 * dlam.row(1) +
              l0 * l1 * dlam.row(2));

  out.values.resize(7, 1);
  MatX gref(7, 2);
  for (int i = 0; i < 3; ++i) {
    out.values(i, 0) = lam[i] * (2 * lam[i] - 1) + bub / 9.0;
    gref.row(i) = (4 * lam[i] - 1) * dlam.row(i) + dbub / 9.0;
  }
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3, b = (i + 2) % 3;
    out.values(3 + i, 0) = 4 * lam[a] * lam[b] - 4.0 * bub / 9.0;
    gref.row(3 + i) =
        4 * (lam[b] * dlam.row(a) + lam[a] * dlam.row(b)) - 4.0 * dbub / 9.0;
  }
  out.values(6, 0) = bub;
  gref.row(6) = dbub;
  out.gradients = gref * g.JinvT.transpose();
  return out;
}

DofMap dof_map(const Space& s, int entity) {
  DofMap dm;
  if (s.kind == SpaceKind::InterfaceTrace) {
    if (entity < 0 || entity >= s.mesh->num_edges() ||
        s.edge_trace_index[entity] < 0) {
      throw ArgumentError("dof_map: edge is not an interface edge");
    }
    const int k = s.edge_trace_index[entity];
    dm.dofs = {2 * k, 2 * k + 1};
  } else {
    if (entity < 0 || entity >= s.mesh->num_triangles() ||
        s.cell_dofs[entity].empty()) {
      throw ArgumentError("dof_map: triangle is not in the space's domain");
    }
    dm.dofs = s.cell_dofs[entity];
  }
  dm.signs.assign(dm.dofs.size(), 1.0);
  return dm;
}

Vec2 edge_normal_moments(const Mesh& mesh, int edge,
                         const std::function<Vec2(const Vec2&)>& field,
                         int quad_degree) {
  const auto rule = make_quadrature(QuadDomain::Edge, quad_degree);
  const Vec2 n = mesh.edge_normal[edge];
  const double len = mesh.edge_length(edge);
  Vec2 m = Vec2::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = rule.points[q].x();
    const double vn = field(mesh.edge_point(edge, t)).dot(n);
    const double w = rule.weights[q] * len;
    m.x() += w * (1.0 - t) * vn;
    m.y() += w * t * vn;
  }
  return m;
}

}  // namespace sdopt
