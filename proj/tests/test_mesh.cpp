#include <algorithm>
#include <array>
#include <cmath>

#include "doctest.h"
#include "sdopt/mesh.hpp"

using namespace sdopt;

namespace {

const Rect kStokesRect{0, 1, 1, 2};  // free-flow box on top
const Rect kDarcyRect{0, 1, 0, 1};   // porous box below

int count_tag(const Mesh& m, EdgeTag tag) {
  int n = 0;
  for (auto t : m.edge_tag) n += (t == tag);
  return n;
}

}  // namespace

TEST_CASE("coarsest two-box mesh has the hand-counted entities") {
  const Mesh m = build_two_domain_mesh(kStokesRect, kDarcyRect, 1);
  CHECK(m.num_vertices() == 6);
  CHECK(m.num_edges() == 9);
  CHECK(m.num_triangles() == 4);
  CHECK(count_tag(m, EdgeTag::Interface) == 1);
  CHECK(count_tag(m, EdgeTag::GammaS) == 3);
  CHECK(count_tag(m, EdgeTag::GammaD) == 3);
  CHECK(count_tag(m, EdgeTag::Interior) == 2);
  CHECK(m.h == doctest::Approx(std::sqrt(2.0)));
  CHECK_NOTHROW(check_mesh(m));
}

TEST_CASE("n0 = 2 mesh counts and diagonal layout") {
  const Mesh m = build_two_domain_mesh(kStokesRect, kDarcyRect, 2);
  CHECK(m.num_vertices() == 15);
  CHECK(m.num_edges() == 30);
  CHECK(m.num_triangles() == 16);
  CHECK(count_tag(m, EdgeTag::Interface) == 2);
  CHECK(count_tag(m, EdgeTag::GammaS) == 6);
  CHECK(count_tag(m, EdgeTag::GammaD) == 6);

  // Checkerboard diagonals: cell (0,0) splits bottom-left to top-right,
  // cell (1,0) the other way (vertex ids on the 3-wide grid).
  CHECK(m.tri_vertices[0] == std::array<int, 3>{0, 1, 4});
  CHECK(m.tri_vertices[1] == std::array<int, 3>{0, 4, 3});
  CHECK(m.tri_vertices[2] == std::array<int, 3>{1, 2, 4});
  CHECK(m.tri_vertices[3] == std::array<int, 3>{2, 5, 4});
}

TEST_CASE("interface normals point from the free-flow into the porous side") {
  SUBCASE("free flow above") {
    const Mesh m = build_two_domain_mesh(kStokesRect, kDarcyRect, 2);
    for (const auto& ie : interface_edges(m)) {
      CHECK(m.tri_subdomain[ie.tri_s] == Subdomain::Stokes);
      CHECK(m.tri_subdomain[ie.tri_d] == Subdomain::Darcy);
      CHECK(ie.normal.x() == doctest::Approx(0.0));
      CHECK(ie.normal.y() == doctest::Approx(-1.0));
      CHECK(m.edge_point(ie.edge, 0.5).y() == doctest::Approx(1.0));
    }
  }
  SUBCASE("free flow below") {
    const Mesh m = build_two_domain_mesh(kDarcyRect, kStokesRect, 2);
    for (const auto& ie : interface_edges(m)) {
      CHECK(ie.normal.y() == doctest::Approx(1.0));
    }
  }
  SUBCASE("free flow left") {
    const Mesh m = build_two_domain_mesh(Rect{0, 1, 0, 1}, Rect{1, 2, 0, 1}, 2);
    CHECK(interface_edges(m).size() == 2);
    for (const auto& ie : interface_edges(m)) {
      CHECK(ie.normal.x() == doctest::Approx(1.0));
      CHECK(ie.normal.y() == doctest::Approx(0.0));
      CHECK(m.edge_point(ie.edge, 0.25).x() == doctest::Approx(1.0));
    }
  }
  SUBCASE("free flow right") {
    const Mesh m = build_two_domain_mesh(Rect{1, 2, 0, 1}, Rect{0, 1, 0, 1}, 2);
    for (const auto& ie : interface_edges(m)) {
      CHECK(ie.normal.x() == doctest::Approx(-1.0));
    }
  }
}

TEST_CASE("every triangle is counterclockwise with consistent edge layout") {
  const Mesh m = build_two_domain_mesh(kStokesRect, kDarcyRect, 2);
  for (int t = 0; t < m.num_triangles(); ++t) {
    CHECK(m.tri_area(t) > 0);
    for (int i = 0; i < 3; ++i) {
      // Edge i is opposite vertex i: its endpoints are the other two.
      const int e = m.tri_edges[t][i];
      const int a = m.tri_vertices[t][(i + 1) % 3];
      const int b = m.tri_vertices[t][(i + 2) % 3];
      CHECK(m.edge_vertices[e][0] == std::min(a, b));
      CHECK(m.edge_vertices[e][1] == std::max(a, b));
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    CHECK(m.edge_normal[e].norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.edge_tris[e][0] >= 0);
  }
}

TEST_CASE("uniform refinement quadruples triangles and preserves structure") {
  Mesh m = build_two_domain_mesh(kStokesRect, kDarcyRect, 1);
  const double ratio0 = shape_regularity_ratio(m);
  int expected_tris = 4;
  int expected_interface = 1;
  double expected_h = std::sqrt(2.0);
  for (int level = 0; level < 3; ++level) {
    m = refine_uniform(m);
    expected_tris *= 4;
    expected_interface *= 2;
    expected_h /= 2;
    CHECK(m.num_triangles() == expected_tris);
    CHECK(count_tag(m, EdgeTag::Interface) == expected_interface);
    CHECK(m.h == doctest::Approx(expected_h));
    CHECK(m.num_vertices() - m.num_edges() + m.num_triangles() == 1);
    CHECK(shape_regularity_ratio(m) == doctest::Approx(ratio0));
    CHECK_NOTHROW(check_mesh(m));
  }
  // Right isosceles triangles: diameter / inradius = 2 + 2√2.
  CHECK(ratio0 == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)));
}

TEST_CASE("refined interface midpoints stay on the interface line") {
  Mesh m = build_two_domain_mesh(kStokesRect, kDarcyRect, 2);
  m = refine_uniform(m);
  for (const auto& ie : interface_edges(m)) {
    for (double t : {0.0, 0.5, 1.0}) {
      CHECK(m.edge_point(ie.edge, t).y() == doctest::Approx(1.0));
    }
    CHECK(ie.normal.y() == doctest::Approx(-1.0));
  }
}

TEST_CASE("geometry helpers agree with closed forms") {
  const Mesh m = build_two_domain_mesh(kStokesRect, kDarcyRect, 2);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto g = m.tri_geometry(t);
    CHECK(g.det == doctest::Approx(2.0 * m.tri_area(t)));
    CHECK(m.tri_area(t) == doctest::Approx(0.125));
    CHECK(m.tri_diameter(t) == doctest::Approx(std::sqrt(2.0) / 2));
    // det J * J^{-T} J^T = det J * I.
    const Mat2 prod = g.JinvT * g.J.transpose();
    CHECK(prod(0, 0) == doctest::Approx(1.0));
    CHECK(prod(1, 1) == doctest::Approx(1.0));
    CHECK(prod(0, 1) == doctest::Approx(0.0));

    const auto& tv = m.tri_vertices[t];
    const Vec2 centroid =
        (m.vertices[tv[0]] + m.vertices[tv[1]] + m.vertices[tv[2]]) / 3.0;
    const Vec2 xi = m.ref_coords(t, centroid);
    CHECK(xi.x() == doctest::Approx(1.0 / 3.0));
    CHECK(xi.y() == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("non-square boxes subdivide per unit length") {
  const Mesh m = build_two_domain_mesh(Rect{0, 2, 1, 2}, Rect{0, 2, 0, 1}, 1);
  CHECK(m.num_triangles() == 8);
  CHECK(interface_edges(m).size() == 2);
  CHECK(shape_regularity_ratio(m) ==
        doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)));
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(build_two_domain_mesh(kStokesRect, kDarcyRect, 0),
                  ArgumentError);
  // Disjoint boxes.
  CHECK_THROWS_AS(build_two_domain_mesh(Rect{0, 1, 2, 3}, Rect{0, 1, 0, 1}, 1),
                  GeometryError);
  // Shared edge only partial.
  CHECK_THROWS_AS(build_two_domain_mesh(Rect{0, 1, 1, 2}, Rect{0, 2, 0, 1}, 1),
                  GeometryError);
  // Degenerate box.
  CHECK_THROWS_AS(build_two_domain_mesh(Rect{0, 1, 1, 1}, Rect{0, 1, 0, 1}, 1),
                  GeometryError);
  // Side length not a whole multiple of the cell size.
  CHECK_THROWS_AS(
      build_two_domain_mesh(Rect{0, 1.5, 1, 2}, Rect{0, 1.5, 0, 1}, 1),
      GeometryError);
}
