#ifndef SDOPT_MESH_HPP
#define SDOPT_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include "sdopt/types.hpp"

namespace sdopt {

/// Axis-aligned rectangle (x0, x1) × (y0, y1).
struct Rect {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

enum class Subdomain : int { Stokes = 0, Darcy = 1 };

enum class EdgeTag : int {
  Interior = 0,   // shared by two triangles of the same subdomain
  GammaS = 1,     // outer boundary of the free-flow subdomain
  GammaD = 2,     // outer boundary of the porous subdomain
  Interface = 3,  // shared by one Stokes and one Darcy triangle
};

/// Affine geometry of one triangle: x(ξ) = v0 + J ξ with positive det J.
struct TriGeometry {
  Vec2 v0;
  Mat2 J;
  Mat2 JinvT;  // inverse transpose, maps reference gradients to physical
  double det;  // = 2 · area
};

/// One interface edge with its two incident triangles and the unit normal
/// pointing from the free-flow side into the porous side.
struct InterfaceEdge {
  int edge;
  int tri_s;
  int tri_d;
  Vec2 normal;
};

/// Conforming triangulation of two axis-aligned rectangles that share one
/// full edge (the interface). Vertex/edge/triangle connectivity is fully
/// indexed; every edge stores a globally oriented unit normal (on the
/// interface it points from the free-flow into the porous subdomain).
/// Immutable after construction.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> tri_vertices;   // CCW
  std::vector<Subdomain> tri_subdomain;
  std::vector<std::array<int, 3>> tri_edges;      // edge i opposite vertex i
  std::vector<std::array<int, 2>> edge_vertices;  // sorted, v0 < v1
  std::vector<EdgeTag> edge_tag;
  std::vector<std::array<int, 2>> edge_tris;      // {owner, neighbor or -1}
  std::vector<Vec2> edge_normal;                  // unit, outward from owner
  double h = 0.0;                                 // max triangle diameter

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(tri_vertices.size()); }
  int num_edges() const { return static_cast<int>(edge_vertices.size()); }

  TriGeometry tri_geometry(int t) const;
  double tri_area(int t) const;
  double tri_diameter(int t) const;
  double edge_length(int e) const;
  /// Point on edge e at parameter t ∈ [0,1], measured from the lower-indexed
  /// vertex (the global edge orientation).
  Vec2 edge_point(int e, double t) const;
  /// Reference coordinates of physical point p within triangle t.
  Vec2 ref_coords(int t, const Vec2& p) const;
};

/// Build the two-subdomain mesh with n0 subdivisions per unit length. The
/// rectangles must share exactly one full edge; cells are split into CCW
/// triangles with checkerboard-alternating diagonals.
Mesh build_two_domain_mesh(const Rect& rect_s, const Rect& rect_d, int n0);

/// Red refinement: each triangle splits into 4 congruent children via edge
/// midpoints; h halves exactly and all edge tags are inherited.
Mesh refine_uniform(const Mesh& m);

/// All interface edges with incident triangles and the stored unit normal.
std::vector<InterfaceEdge> interface_edges(const Mesh& m);

/// Max over triangles of diameter / inradius (shape-regularity measure).
double shape_regularity_ratio(const Mesh& m);

/// Throws if conformity is violated (edge sharing counts, orientation,
/// normals, interface matching). Used by tests and after refinement.
void check_mesh(const Mesh& m);

}  // namespace sdopt

#endif  // SDOPT_MESH_HPP
