#include "sdopt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sdopt {

namespace {

constexpr double kGeomTol = 1e-12;

bool close(double a, double b) { return std::abs(a - b) < kGeomTol; }

// Plane rotation by quarter turns (orientation preserving, so CCW triangles
// stay CCW). k = number of +90° turns.
Vec2 rotate_quarters(const Vec2& p, int k) {
  switch (((k % 4) + 4) % 4) {
    case 1: return {-p.y(), p.x()};
    case 2: return {-p.x(), -p.y()};
    case 3: return {p.y(), -p.x()};
    default: return p;
  }
}

Rect rotate_rect(const Rect& r, int k) {
  const Vec2 a = rotate_quarters({r.x0, r.y0}, k);
  const Vec2 b = rotate_quarters({r.x1, r.y1}, k);
  return {std::min(a.x(), b.x()), std::max(a.x(), b.x()),
          std::min(a.y(), b.y()), std::max(a.y(), b.y())};
}

// Index a sorted vertex pair.
std::array<int, 2> edge_key(int a, int b) {
  return {std::min(a, b), std::max(a, b)};
}

// Populate edges, incidence, tags, and normals from triangle connectivity.
// Tag resolution: an edge between triangles of different subdomains is the
// interface; a boundary edge takes its single triangle's subdomain tag;
// everything else is interior. Under red refinement this reproduces exactly
// the tags a child edge would inherit from its parent.
void finalize_edges(Mesh& m) {
  std::map<std::array<int, 2>, int> index;
  m.edge_vertices.clear();
  m.edge_tag.clear();
  m.edge_tris.clear();
  m.edge_normal.clear();
  m.tri_edges.assign(m.tri_vertices.size(), {-1, -1, -1});

  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tv = m.tri_vertices[t];
    for (int i = 0; i < 3; ++i) {
      // Edge i is opposite vertex i.
      const auto key = edge_key(tv[(i + 1) % 3], tv[(i + 2) % 3]);
      auto it = index.find(key);
      if (it == index.end()) {
        const int e = static_cast<int>(m.edge_vertices.size());
        index.emplace(key, e);
        m.edge_vertices.push_back(key);
        m.edge_tris.push_back({t, -1});
        m.tri_edges[t][i] = e;
      } else {
        const int e = it->second;
        if (m.edge_tris[e][1] != -1) {
          throw GeometryError("mesh: edge shared by more than two triangles");
        }
        m.edge_tris[e][1] = t;
        m.tri_edges[t][i] = e;
      }
    }
  }

  const int ne = static_cast<int>(m.edge_vertices.size());
  m.edge_tag.resize(ne);
  m.edge_normal.resize(ne);
  for (int e = 0; e < ne; ++e) {
    int t0 = m.edge_tris[e][0];
    int t1 = m.edge_tris[e][1];
    if (t1 == -1) {
      m.edge_tag[e] = (m.tri_subdomain[t0] == Subdomain::Stokes)
                          ? EdgeTag::GammaS
                          : EdgeTag::GammaD;
    } else if (m.tri_subdomain[t0] != m.tri_subdomain[t1]) {
      m.edge_tag[e] = EdgeTag::Interface;
      // The owner of an interface edge is the free-flow triangle, so the
      // stored outward-of-owner normal is the free-flow-side normal.
      if (m.tri_subdomain[t0] != Subdomain::Stokes) {
        std::swap(m.edge_tris[e][0], m.edge_tris[e][1]);
        t0 = m.edge_tris[e][0];
      }
    } else {
      m.edge_tag[e] = EdgeTag::Interior;
    }

    const Vec2 a = m.vertices[m.edge_vertices[e][0]];
    const Vec2 b = m.vertices[m.edge_vertices[e][1]];
    const Vec2 d = (b - a).normalized();
    Vec2 n(d.y(), -d.x());
    // Orient outward from the owner triangle.
    const auto& tv = m.tri_vertices[t0];
    const Vec2 centroid =
        (m.vertices[tv[0]] + m.vertices[tv[1]] + m.vertices[tv[2]]) / 3.0;
    if (n.dot(0.5 * (a + b) - centroid) < 0) n = -n;
    m.edge_normal[e] = n;
  }

  m.h = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    m.h = std::max(m.h, m.tri_diameter(t));
  }
}

}  // namespace

TriGeometry Mesh::tri_geometry(int t) const {
  const auto& tv = tri_vertices[t];
  TriGeometry g;
  g.v0 = vertices[tv[0]];
  g.J.col(0) = vertices[tv[1]] - g.v0;
  g.J.col(1) = vertices[tv[2]] - g.v0;
  g.det = g.J.determinant();
  Mat2 Jinv;
  Jinv << g.J(1, 1), -g.J(0, 1), -g.J(1, 0), g.J(0, 0);
  Jinv /= g.det;
  g.JinvT = Jinv.transpose();
  return g;
}

double Mesh::tri_area(int t) const { return 0.5 * tri_geometry(t).det; }

double Mesh::tri_diameter(int t) const {
  const auto& tv = tri_vertices[t];
  double d = 0;
  for (int i = 0; i < 3; ++i) {
    d = std::max(d, (vertices[tv[i]] - vertices[tv[(i + 1) % 3]]).norm());
  }
  return d;
}

double Mesh::edge_length(int e) const {
  return (vertices[edge_vertices[e][1]] - vertices[edge_vertices[e][0]]).norm();
}

Vec2 Mesh::edge_point(int e, double t) const {
  const Vec2 a = vertices[edge_vertices[e][0]];
  const Vec2 b = vertices[edge_vertices[e][1]];
  return a + t * (b - a);
}

Vec2 Mesh::ref_coords(int t, const Vec2& p) const {
  const TriGeometry g = tri_geometry(t);
  return g.JinvT.transpose() * (p - g.v0);
}

Mesh build_two_domain_mesh(const Rect& rect_s, const Rect& rect_d, int n0) {
  if (n0 < 1) throw ArgumentError("build_two_domain_mesh: n0 must be >= 1");
  for (const Rect* r : {&rect_s, &rect_d}) {
    if (r->width() <= kGeomTol || r->height() <= kGeomTol) {
      throw GeometryError("build_two_domain_mesh: degenerate rectangle");
    }
  }

  // Canonicalize by quarter-turn rotation so the free-flow rectangle sits
  // directly above the porous one with matching x-extent.
  int rot = -1;
  for (int k = 0; k < 4; ++k) {
    const Rect s = rotate_rect(rect_s, k);
    const Rect d = rotate_rect(rect_d, k);
    if (close(s.y0, d.y1) && close(s.x0, d.x0) && close(s.x1, d.x1)) {
      rot = k;
      break;
    }
  }
  if (rot < 0) {
    throw GeometryError(
        "build_two_domain_mesh: rectangles do not share exactly one full "
        "edge");
  }
  const Rect s = rotate_rect(rect_s, rot);
  const Rect d = rotate_rect(rect_d, rot);

  const auto count = [n0](double len) {
    const int n = static_cast<int>(std::lround(len * n0));
    if (n < 1 || !close(len * n0, n)) {
      throw GeometryError(
          "build_two_domain_mesh: n0 must subdivide every side into whole "
          "cells");
    }
    return n;
  };
  const int nx = count(s.width());
  const int ny_d = count(d.height());
  const int ny_s = count(s.height());
  const int ny = ny_d + ny_s;
  const double dx = s.width() / nx;
  const double dy_d = d.height() / ny_d;
  const double dy_s = s.height() / ny_s;

  Mesh m;
  const auto y_of = [&](int j) {
    return (j <= ny_d) ? d.y0 + j * dy_d : d.y1 + (j - ny_d) * dy_s;
  };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      m.vertices.push_back(
          rotate_quarters({s.x0 + i * dx, y_of(j)}, -rot));
    }
  }
  const auto vid = [&](int i, int j) { return j * (nx + 1) + i; };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int bl = vid(i, j), br = vid(i + 1, j);
      const int tr = vid(i + 1, j + 1), tl = vid(i, j + 1);
      const Subdomain sub = (j < ny_d) ? Subdomain::Darcy : Subdomain::Stokes;
      if ((i + j) % 2 == 0) {
        m.tri_vertices.push_back({bl, br, tr});
        m.tri_vertices.push_back({bl, tr, tl});
      } else {
        m.tri_vertices.push_back({bl, br, tl});
        m.tri_vertices.push_back({br, tr, tl});
      }
      m.tri_subdomain.push_back(sub);
      m.tri_subdomain.push_back(sub);
    }
  }

  finalize_edges(m);
  check_mesh(m);
  return m;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh m;
  m.vertices = mesh.vertices;
  m.vertices.reserve(mesh.vertices.size() + mesh.edge_vertices.size());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    m.vertices.push_back(mesh.edge_point(e, 0.5));
  }
  const int nv0 = mesh.num_vertices();

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tv = mesh.tri_vertices[t];
    // Midpoint opposite local vertex i lies on edge i.
    const int m0 = nv0 + mesh.tri_edges[t][0];
    const int m1 = nv0 + mesh.tri_edges[t][1];
    const int m2 = nv0 + mesh.tri_edges[t][2];
    const Subdomain sub = mesh.tri_subdomain[t];
    m.tri_vertices.push_back({tv[0], m2, m1});
    m.tri_vertices.push_back({m2, tv[1], m0});
    m.tri_vertices.push_back({m1, m0, tv[2]});
    m.tri_vertices.push_back({m0, m1, m2});
    for (int c = 0; c < 4; ++c) m.tri_subdomain.push_back(sub);
  }

  finalize_edges(m);
  check_mesh(m);
  return m;
}

std::vector<InterfaceEdge> interface_edges(const Mesh& m) {
  std::vector<InterfaceEdge> out;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge_tag[e] == EdgeTag::Interface) {
      out.push_back({e, m.edge_tris[e][0], m.edge_tris[e][1],
                     m.edge_normal[e]});
    }
  }
  return out;
}

double shape_regularity_ratio(const Mesh& m) {
  double worst = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tv = m.tri_vertices[t];
    double perim = 0;
    for (int i = 0; i < 3; ++i) {
      perim += (m.vertices[tv[i]] - m.vertices[tv[(i + 1) % 3]]).norm();
    }
    const double inradius = 2.0 * m.tri_area(t) / perim;
    worst = std::max(worst, m.tri_diameter(t) / inradius);
  }
  return worst;
}

void check_mesh(const Mesh& m) {
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.tri_geometry(t).det <= 0) {
      throw GeometryError("check_mesh: triangle with non-positive area");
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const int t0 = m.edge_tris[e][0];
    const int t1 = m.edge_tris[e][1];
    const EdgeTag tag = m.edge_tag[e];
    const bool two = (t1 != -1);
    if ((tag == EdgeTag::Interior || tag == EdgeTag::Interface) != two) {
      throw GeometryError("check_mesh: edge sharing count violates its tag");
    }
    if (tag == EdgeTag::Interface) {
      if (m.tri_subdomain[t0] != Subdomain::Stokes ||
          m.tri_subdomain[t1] != Subdomain::Darcy) {
        throw GeometryError("check_mesh: interface edge owner must be the "
                            "free-flow triangle");
      }
    }
    if (std::abs(m.edge_normal[e].norm() - 1.0) > 1e-13) {
      throw GeometryError("check_mesh: edge normal not unit length");
    }
  }
  const long euler = static_cast<long>(m.num_vertices()) -
                     static_cast<long>(m.num_edges()) +
                     static_cast<long>(m.num_triangles());
  if (euler != 1) {
    throw GeometryError("check_mesh: Euler relation V - E + T = 1 violated");
  }
}

}  // namespace sdopt
