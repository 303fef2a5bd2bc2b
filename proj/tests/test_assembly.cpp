#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "sdopt/assembly.hpp"
#include "sdopt/mesh.hpp"
#include "sdopt/reconstruction.hpp"
#include "sdopt/spaces.hpp"

namespace {

using namespace sdopt;

const Rect kStokesRect{0.0, 1.0, 1.0, 2.0};
const Rect kDarcyRect{0.0, 1.0, 0.0, 1.0};

struct Fixture {
  Mesh mesh;
  Space stokes, darcy, pressure, trace;
  VelocityPair vel;

  explicit Fixture(int n0, int refinements = 0) {
    mesh = build_two_domain_mesh(kStokesRect, kDarcyRect, n0);
    for (int i = 0; i < refinements; ++i) mesh = refine_uniform(mesh);
    stokes = make_space(mesh, SpaceKind::StokesVelocity);
    darcy = make_space(mesh, SpaceKind::DarcyVelocity, Subdomain::Darcy);
    pressure = make_space(mesh, SpaceKind::Pressure);
    trace = make_space(mesh, SpaceKind::InterfaceTrace);
    vel = VelocityPair{&stokes, &darcy};
  }
};

ProblemData anisotropic_data() {
  ProblemData data;
  data.K = [](const Vec2&) {
    Mat2 K;
    K << 1.5, 0.2, 0.2, 1.0;
    return K;
  };
  return data;
}

double max_abs(const SpMat& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

double asymmetry(const SpMat& A) {
  return max_abs(SpMat(SpMat(A.transpose()) - A));
}

VecX random_vector(int n, std::mt19937& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(gen);
  return v;
}

}  // namespace

TEST_CASE("velocity coupling form: symmetry, semidefiniteness, scaling") {
  Fixture fx(2);
  ProblemData data = anisotropic_data();
  const SpMat A = assemble_a(fx.mesh, fx.vel, data);
  REQUIRE(A.rows() == fx.vel.ndof());
  REQUIRE(A.cols() == fx.vel.ndof());

  CHECK(asymmetry(A) < 1e-12);

  std::mt19937 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    const VecX v = random_vector(fx.vel.ndof(), gen);
    CHECK(v.dot(A * v) >= -1e-12 * v.squaredNorm());
  }

  ProblemData doubled = data;
  doubled.mu = 2.0;
  const SpMat A2 = assemble_a(fx.mesh, fx.vel, doubled);
  CHECK(max_abs(SpMat(A2 - SpMat(2.0 * A))) < 1e-12 * max_abs(A));

  // No coupling between the two velocity blocks: every term of the form
  // lives on one subdomain (the slip term touches free-flow dofs only).
  const int off = fx.vel.darcy_offset();
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      if (std::abs(it.value()) < 1e-14) continue;
      CHECK((it.row() < off) == (it.col() < off));
    }
  }
}

TEST_CASE("velocity coupling form: porous block equals weighted RT mass") {
  Fixture fx(2);
  const int off = fx.vel.darcy_offset();
  const SpMat M_rt = assemble_rt_mass(fx.mesh, fx.darcy);

  ProblemData data;  // K unset: identity permeability
  const SpMat A = assemble_a(fx.mesh, fx.vel, data);
  double worst = 0.0;
  for (int k = 0; k < M_rt.outerSize(); ++k) {
    for (SpMat::InnerIterator it(M_rt, k); it; ++it) {
      worst = std::max(worst, std::abs(A.coeff(off + it.row(), off + it.col()) -
                                       it.value()));
    }
  }
  CHECK(worst < 1e-13);

  ProblemData half;  // K = 2I, so mu K^{-1} = I/2
  half.K = [](const Vec2&) { return Mat2(2.0 * Mat2::Identity()); };
  const SpMat Ah = assemble_a(fx.mesh, fx.vel, half);
  worst = 0.0;
  for (int k = 0; k < M_rt.outerSize(); ++k) {
    for (SpMat::InnerIterator it(M_rt, k); it; ++it) {
      worst = std::max(worst, std::abs(Ah.coeff(off + it.row(), off + it.col()) -
                                       0.5 * it.value()));
    }
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("velocity coupling form: slip block against the 1-D trace mass") {
  // On the coarsest mesh the interface is a single unit edge; the slip term
  // with tangent (1,0) adds coef * (1-D quadratic trace mass) to the three
  // horizontal-component dofs whose nodes lie on that edge, and nothing else.
  Fixture fx(1);
  ProblemData data = anisotropic_data();
  ProblemData noslip = data;
  noslip.alpha1 = 0.0;
  const SpMat D =
      SpMat(assemble_a(fx.mesh, fx.vel, data) -
            assemble_a(fx.mesh, fx.vel, noslip));

  const auto gamma = interface_edges(fx.mesh);
  REQUIRE(gamma.size() == 1);
  const int edge = gamma[0].edge;
  const auto& ev = fx.mesh.edge_vertices[edge];
  // Node order along the edge parameter: lower-indexed vertex, then the
  // other vertex, then the midpoint.
  const std::array<int, 3> nodes = {fx.stokes.vertex_node[ev[0]],
                                    fx.stokes.vertex_node[ev[1]],
                                    fx.stokes.edge_node[edge]};
  for (int n : nodes) REQUIRE(n >= 0);

  const double kappa = 1.5;  // tangent (1,0): kappa = K_xx
  const double coef = data.alpha1 * data.mu / std::sqrt(kappa);
  MatX oracle(3, 3);
  oracle << 2.0 / 15.0, -1.0 / 30.0, 1.0 / 15.0,  //
      -1.0 / 30.0, 2.0 / 15.0, 1.0 / 15.0,        //
      1.0 / 15.0, 1.0 / 15.0, 8.0 / 15.0;
  oracle *= coef;

  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      CHECK(std::abs(D.coeff(2 * nodes[a], 2 * nodes[b]) - oracle(a, b)) <
            1e-13);
    }
  }
  // Nothing outside those nine horizontal-component entries.
  std::set<int> allowed;
  for (int n : nodes) allowed.insert(2 * n);
  for (int k = 0; k < D.outerSize(); ++k) {
    for (SpMat::InnerIterator it(D, k); it; ++it) {
      if (std::abs(it.value()) < 1e-14) continue;
      CHECK(allowed.count(it.row()) == 1);
      CHECK(allowed.count(it.col()) == 1);
    }
  }
}

TEST_CASE("divergence form: cellwise identity and locality") {
  Fixture fx(2);
  const SpMat B = assemble_b(fx.mesh, fx.vel, fx.pressure);
  REQUIRE(B.rows() == fx.pressure.ndof);
  REQUIRE(B.cols() == fx.vel.ndof());

  // v = (x, y) interpolates exactly in both spaces; pairing the three
  // pressure dofs of a triangle with it integrates -div v = -2 there.
  const auto linear = [](const Vec2& p) { return p; };
  const VecX v = interpolate_velocity(fx.mesh, fx.vel, linear, linear);
  const VecX Bv = B * v;
  for (int t = 0; t < fx.mesh.num_triangles(); ++t) {
    double s = 0.0;
    for (int dof : fx.pressure.cell_dofs[t]) s += Bv[dof];
    CHECK(std::abs(s + 2.0 * fx.mesh.tri_area(t)) < 1e-13);
  }

  // Constant fields are divergence-free.
  const auto constant = [](const Vec2&) { return Vec2{0.8, -0.45}; };
  const VecX vc = interpolate_velocity(fx.mesh, fx.vel, constant, constant);
  CHECK((B * vc).lpNorm<Eigen::Infinity>() < 1e-13);

  // Rows of a triangle touch only that triangle's velocity dofs.
  std::vector<std::set<int>> tri_vel_dofs(fx.mesh.num_triangles());
  for (int t = 0; t < fx.mesh.num_triangles(); ++t) {
    for (int d : fx.stokes.cell_dofs[t]) tri_vel_dofs[t].insert(d);
    for (int d : fx.darcy.cell_dofs[t]) {
      tri_vel_dofs[t].insert(fx.vel.darcy_offset() + d);
    }
  }
  for (int k = 0; k < B.outerSize(); ++k) {
    for (SpMat::InnerIterator it(B, k); it; ++it) {
      if (std::abs(it.value()) < 1e-14) continue;
      const int t = static_cast<int>(it.row()) / 3;
      CHECK(tri_vel_dofs[t].count(static_cast<int>(it.col())) == 1);
    }
  }
}

TEST_CASE("interface flux rows: dual pairing and cancellation") {
  Fixture fx(2);
  const SpMat C = assemble_interface_constraint(fx.mesh, fx.vel, fx.trace);
  REQUIRE(C.rows() == fx.trace.ndof);
  const int voff = fx.vel.darcy_offset();

  // Porous block: the trace basis is dual to the RT edge moments, so each
  // row hits exactly its own edge dof with -1.
  for (std::size_t k = 0; k < fx.trace.trace_edge.size(); ++k) {
    const int edge = fx.trace.trace_edge[k];
    const int d0 = fx.darcy.rt_edge_dof[edge];
    REQUIRE(d0 >= 0);
    CHECK(std::abs(C.coeff(2 * k, voff + d0) + 1.0) < 1e-12);
    CHECK(std::abs(C.coeff(2 * k + 1, voff + d0 + 1) + 1.0) < 1e-12);
    CHECK(std::abs(C.coeff(2 * k, voff + d0 + 1)) < 1e-12);
    CHECK(std::abs(C.coeff(2 * k + 1, voff + d0)) < 1e-12);
  }
  for (int k = 0; k < C.outerSize(); ++k) {
    for (SpMat::InnerIterator it(C, k); it; ++it) {
      if (it.col() < voff || std::abs(it.value()) < 1e-12) continue;
      const int edge = fx.trace.trace_edge[it.row() / 2];
      const int d0 = fx.darcy.rt_edge_dof[edge];
      const bool at_own_pair =
          it.col() == voff + d0 || it.col() == voff + d0 + 1;
      CHECK(at_own_pair);
    }
  }

  // Tangential free-flow fields have no normal flux: arbitrary horizontal
  // nodal values, zero vertical ones.
  std::mt19937 gen(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  VecX vt = VecX::Zero(fx.vel.ndof());
  for (int i = 0; i < fx.stokes.num_nodes; ++i) vt[2 * i] = normal(gen);
  CHECK((C * vt).lpNorm<Eigen::Infinity>() < 1e-13);

  // A matching constant pair has zero normal jump.
  const auto constant = [](const Vec2&) { return Vec2{1.3, -0.6}; };
  const VecX vc = interpolate_velocity(fx.mesh, fx.vel, constant, constant);
  CHECK((C * vc).lpNorm<Eigen::Infinity>() < 1e-13);

  // Vertical free-flow constant (0, c) against the downward normal (0,-1):
  // every row integrates -c times its trace function, i.e. -c len / 2.
  const double c = 0.75;
  const VecX vs = interpolate_velocity(
      fx.mesh, fx.vel, [&](const Vec2&) { return Vec2{0.0, c}; }, {});
  const VecX rows = C * vs;
  for (std::size_t k = 0; k < fx.trace.trace_edge.size(); ++k) {
    const double len = fx.mesh.edge_length(fx.trace.trace_edge[k]);
    CHECK(std::abs(rows[2 * k] + c * len / 2.0) < 1e-13);
    CHECK(std::abs(rows[2 * k + 1] + c * len / 2.0) < 1e-13);
  }
}

TEST_CASE("velocity mass: plain and reconstruction-weighted") {
  Fixture fx(2);
  const SpMat M = assemble_velocity_mass(fx.mesh, fx.vel, MassMode::Plain);
  CHECK(asymmetry(M) < 1e-12);

  // Unit horizontal field over both boxes: squared norm is the total area 2.
  const auto ex = [](const Vec2&) { return Vec2{1.0, 0.0}; };
  const VecX v1 = interpolate_velocity(fx.mesh, fx.vel, ex, ex);
  CHECK(std::abs(v1.dot(M * v1) - 2.0) < 1e-12);

  const ReconstructionOperator op = build_reconstruction(fx.mesh, fx.vel);
  const SpMat Mr =
      assemble_velocity_mass(fx.mesh, fx.vel, MassMode::PiWeighted, &op);
  CHECK(asymmetry(Mr) < 1e-12);
  CHECK(std::abs(v1.dot(Mr * v1) - 2.0) < 1e-12);

  std::mt19937 gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    const VecX v = random_vector(fx.vel.ndof(), gen);
    CHECK(v.dot(M * v) >= 0.0);
    CHECK(v.dot(Mr * v) >= -1e-12 * v.squaredNorm());
  }

  // The reconstruction is the identity on the porous side, so both masses
  // act identically on porous-only fields.
  VecX vd = VecX::Zero(fx.vel.ndof());
  const VecX tail = random_vector(fx.darcy.ndof, gen);
  vd.tail(fx.darcy.ndof) = tail;
  CHECK(((M - Mr) * vd).lpNorm<Eigen::Infinity>() < 1e-12 * tail.norm());

  CHECK_THROWS_AS(
      assemble_velocity_mass(fx.mesh, fx.vel, MassMode::PiWeighted, nullptr),
      ArgumentError);
}

TEST_CASE("load vectors: volume pairings") {
  Fixture fx(2);
  ProblemData data;
  const Vec2 fconst{0.7, -0.3};
  data.f_s = [&](const Vec2&) { return fconst; };
  data.f_d = [&](const Vec2&) { return fconst; };

  // Pair with the exactly interpolated field (x, y):
  //   integral over (0,1)x(0,2) of (f1 x + f2 y) = f1 + 2 f2.
  const auto linear = [](const Vec2& p) { return p; };
  const VecX v = interpolate_velocity(fx.mesh, fx.vel, linear, linear);
  const double expected = fconst.x() + 2.0 * fconst.y();

  const VecX F =
      assemble_rhs(fx.mesh, fx.vel, data, RhsKind::State, TestMode::Plain);
  CHECK(std::abs(v.dot(F) - expected) < 1e-12);

  // The reconstruction reproduces the linear test field, so the lifted load
  // pairs to the same value.
  const ReconstructionOperator op = build_reconstruction(fx.mesh, fx.vel);
  const VecX Fr = assemble_rhs(fx.mesh, fx.vel, data, RhsKind::State,
                               TestMode::Reconstructed, &op);
  CHECK(std::abs(v.dot(Fr) - expected) < 1e-12);

  // The adjoint load scales the target by -1/sqrt(alpha) and ignores f.
  ProblemData adj;
  adj.alpha = 4.0;
  adj.u_star_s = [&](const Vec2&) { return fconst; };
  adj.u_star_d = [&](const Vec2&) { return fconst; };
  const VecX Fa =
      assemble_rhs(fx.mesh, fx.vel, adj, RhsKind::Adjoint, TestMode::Plain);
  CHECK(std::abs(v.dot(Fa) + 0.5 * expected) < 1e-12);

  ProblemData zero;
  for (const RhsKind kind : {RhsKind::State, RhsKind::Adjoint}) {
    CHECK(assemble_rhs(fx.mesh, fx.vel, zero, kind, TestMode::Plain).norm() ==
          0.0);
  }
  CHECK_THROWS_AS(assemble_rhs(fx.mesh, fx.vel, data, RhsKind::State,
                               TestMode::Reconstructed, nullptr),
                  ArgumentError);
}

TEST_CASE("load vectors: interface residual pairings") {
  Fixture fx(2);
  const double s2 = 1.4, s3 = -0.9;
  ProblemData data;
  data.j2 = [&](const Vec2&) { return s2; };
  data.j3 = [&](const Vec2&) { return s3; };

  // Constant free-flow field (a, b): normal n = (0,-1), tangent (1,0), unit
  // interface length, so the pairing is s2 * (-b) + s3 * a.
  const double a = 0.4, b = 1.1;
  const VecX vs = interpolate_velocity(
      fx.mesh, fx.vel, [&](const Vec2&) { return Vec2{a, b}; }, {});
  const VecX F =
      assemble_rhs(fx.mesh, fx.vel, data, RhsKind::State, TestMode::Plain);
  CHECK(std::abs(vs.dot(F) - (s2 * (-b) + s3 * a)) < 1e-13);

  // Porous-side fields never see the interface residual loads.
  const VecX vd = interpolate_velocity(
      fx.mesh, fx.vel, {}, [](const Vec2&) { return Vec2{0.3, 0.9}; });
  CHECK(std::abs(vd.dot(F)) < 1e-14);

  // Residual loads test against the plain trace in both modes.
  const ReconstructionOperator op = build_reconstruction(fx.mesh, fx.vel);
  const VecX Fr = assemble_rhs(fx.mesh, fx.vel, data, RhsKind::State,
                               TestMode::Reconstructed, &op);
  CHECK((F - Fr).lpNorm<Eigen::Infinity>() < 1e-15);

  // Position-dependent residuals follow the edge parameterization:
  // j3 = x pairs with (a, 0) to a * 1/2, j2 = x with (0, b) to -b * 1/2.
  ProblemData vary;
  vary.j3 = [](const Vec2& p) { return p.x(); };
  vary.j2 = [](const Vec2& p) { return p.x(); };
  const VecX Fv =
      assemble_rhs(fx.mesh, fx.vel, vary, RhsKind::State, TestMode::Plain);
  const VecX va = interpolate_velocity(
      fx.mesh, fx.vel, [&](const Vec2&) { return Vec2{a, 0.0}; }, {});
  const VecX vb = interpolate_velocity(
      fx.mesh, fx.vel, [&](const Vec2&) { return Vec2{0.0, b}; }, {});
  CHECK(std::abs(va.dot(Fv) - 0.5 * a) < 1e-13);
  CHECK(std::abs(vb.dot(Fv) + 0.5 * b) < 1e-13);

  // Adjoint interface residuals enter the adjoint load the same way.
  ProblemData adjoint;
  adjoint.j2z = [&](const Vec2&) { return s2; };
  adjoint.j3z = [&](const Vec2&) { return s3; };
  const VecX Fz =
      assemble_rhs(fx.mesh, fx.vel, adjoint, RhsKind::Adjoint, TestMode::Plain);
  CHECK(std::abs(vs.dot(Fz) - (s2 * (-b) + s3 * a)) < 1e-13);
}

TEST_CASE("assembly quadrature is saturated for these spaces") {
  Fixture fx(2);
  ProblemData data = anisotropic_data();

  const SpMat A1 = assemble_a(fx.mesh, fx.vel, data);
  const SpMat A2 = assemble_a(fx.mesh, fx.vel, data, 8, 7);
  CHECK(max_abs(SpMat(A1 - A2)) < 1e-12);

  const SpMat B1 = assemble_b(fx.mesh, fx.vel, fx.pressure);
  const SpMat B2 = assemble_b(fx.mesh, fx.vel, fx.pressure, 8);
  CHECK(max_abs(SpMat(B1 - B2)) < 1e-12);

  const SpMat C1 = assemble_interface_constraint(fx.mesh, fx.vel, fx.trace);
  const SpMat C2 = assemble_interface_constraint(fx.mesh, fx.vel, fx.trace, 7);
  CHECK(max_abs(SpMat(C1 - C2)) < 1e-12);

  const SpMat M1 = assemble_velocity_mass(fx.mesh, fx.vel, MassMode::Plain);
  const SpMat M2 =
      assemble_velocity_mass(fx.mesh, fx.vel, MassMode::Plain, nullptr, 8);
  CHECK(max_abs(SpMat(M1 - M2)) < 1e-12);
}

TEST_CASE("permeability validation") {
  ProblemData data;
  CHECK((eval_permeability(data, Vec2{0.5, 0.5}) - Mat2::Identity()).norm() ==
        0.0);

  data.K = [](const Vec2&) {
    Mat2 K;
    K << 1.0, 0.5, 0.0, 1.0;  // not symmetric
    return K;
  };
  CHECK_THROWS_AS(eval_permeability(data, Vec2{0.5, 0.5}), ArgumentError);

  data.K = [](const Vec2&) {
    Mat2 K;
    K << 1.0, 2.0, 2.0, 1.0;  // symmetric, indefinite
    return K;
  };
  CHECK_THROWS_AS(eval_permeability(data, Vec2{0.5, 0.5}), ArgumentError);

  data.K = [](const Vec2&) { return Mat2(-Mat2::Identity()); };
  CHECK_THROWS_AS(eval_permeability(data, Vec2{0.5, 0.5}), ArgumentError);

  data.K = [](const Vec2&) {
    Mat2 K;
    K << 1.5, 0.2, 0.2, 1.0;
    return K;
  };
  const Mat2 K = eval_permeability(data, Vec2{0.5, 0.5});
  CHECK(K(0, 0) == 1.5);
  CHECK(K(0, 1) == 0.2);
}
