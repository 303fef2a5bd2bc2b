#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sdopt/assembly.hpp"
#include "sdopt/verify.hpp"

using namespace sdopt;

namespace {

const Rect kStokesRect{0.0, 1.0, 1.0, 2.0};
const Rect kDarcyRect{0.0, 1.0, 0.0, 1.0};

struct Fixture {
  Mesh mesh;
  Space stokes, darcy, pressure, trace;
  VelocityPair vel;

  explicit Fixture(int n0, int refinements = 0) {
    mesh = build_two_domain_mesh(kStokesRect, kDarcyRect, n0);
    for (int r = 0; r < refinements; ++r) mesh = refine_uniform(mesh);
    stokes = make_space(mesh, SpaceKind::StokesVelocity);
    darcy = make_space(mesh, SpaceKind::DarcyVelocity, Subdomain::Darcy);
    pressure = make_space(mesh, SpaceKind::Pressure);
    trace = make_space(mesh, SpaceKind::InterfaceTrace);
    vel = VelocityPair{&stokes, &darcy};
  }
};

// Central finite differences of a scalar jet function, for cross-checking
// the analytically propagated derivatives.
void check_jet_derivatives(const JetFn& f, const Vec2& p) {
  const double h1 = 1e-5, h2 = 1e-4;
  auto val = [&](double x, double y) { return eval_jet(f, Vec2{x, y}).v; };
  const Jet j = eval_jet(f, p);
  const double x = p.x(), y = p.y();

  const double fdx = (val(x + h1, y) - val(x - h1, y)) / (2.0 * h1);
  const double fdy = (val(x, y + h1) - val(x, y - h1)) / (2.0 * h1);
  CHECK(std::abs(fdx - j.dx) < 1e-6 * (1.0 + std::abs(j.dx)));
  CHECK(std::abs(fdy - j.dy) < 1e-6 * (1.0 + std::abs(j.dy)));

  const double fdxx =
      (val(x + h2, y) - 2.0 * val(x, y) + val(x - h2, y)) / (h2 * h2);
  const double fdyy =
      (val(x, y + h2) - 2.0 * val(x, y) + val(x, y - h2)) / (h2 * h2);
  const double fdxy = (val(x + h2, y + h2) - val(x + h2, y - h2) -
                       val(x - h2, y + h2) + val(x - h2, y - h2)) /
                      (4.0 * h2 * h2);
  CHECK(std::abs(fdxx - j.dxx) < 1e-5 * (1.0 + std::abs(j.dxx)));
  CHECK(std::abs(fdyy - j.dyy) < 1e-5 * (1.0 + std::abs(j.dyy)));
  CHECK(std::abs(fdxy - j.dxy) < 1e-5 * (1.0 + std::abs(j.dxy)));
}

// Divergence-free free-flow field with u, ∇u = 0 on the whole free-flow
// boundary (interface included): the curl of x³(1-x)³(y-1)³(2-y)³.
ExactFields compact_stream_octet() {
  ExactFields ex;
  ex.mu = 1.7;
  ex.u_s.x = [](const Jet& x, const Jet& y) {
    return pow_int(x, 3) * pow_int(1.0 - x, 3) *
           (3.0 * pow_int(y - 1.0, 2) * pow_int(2.0 - y, 2) * (3.0 - 2.0 * y));
  };
  ex.u_s.y = [](const Jet& x, const Jet& y) {
    return -(3.0 * pow_int(x, 2) * pow_int(1.0 - x, 2) * (1.0 - 2.0 * x)) *
           pow_int(y - 1.0, 3) * pow_int(2.0 - y, 3);
  };
  return ex;
}

}  // namespace

TEST_CASE("trigonometric octet: solenoidal free-flow parts and derivatives") {
  const ExactFields ex = trig_octet();
  std::mt19937 gen(2024u);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(1.0, 2.0);

  for (int k = 0; k < 30; ++k) {
    const Vec2 p{ux(gen), uy(gen)};
    const double div_u = eval_jet(ex.u_s.x, p).dx + eval_jet(ex.u_s.y, p).dy;
    const double div_z = eval_jet(ex.z_s.x, p).dx + eval_jet(ex.z_s.y, p).dy;
    CHECK(std::abs(div_u) < 1e-12);
    CHECK(std::abs(div_z) < 1e-12);
  }

  // Zero normal trace on the outer free-flow boundary (sides x = 0, 1 and
  // top y = 2), nonzero velocity on the interface y = 1.
  for (int k = 0; k < 10; ++k) {
    const double s = (k + 0.5) / 10.0;
    CHECK(std::abs(eval_field(ex.u_s, Vec2{0.0, 1.0 + s}).x()) < 1e-14);
    CHECK(std::abs(eval_field(ex.u_s, Vec2{1.0, 1.0 + s}).x()) < 1e-14);
    CHECK(std::abs(eval_field(ex.u_s, Vec2{s, 2.0}).y()) < 1e-14);
    CHECK(std::abs(eval_field(ex.z_s, Vec2{0.0, 1.0 + s}).x()) < 1e-14);
    CHECK(std::abs(eval_field(ex.z_s, Vec2{1.0, 1.0 + s}).x()) < 1e-14);
    CHECK(std::abs(eval_field(ex.z_s, Vec2{s, 2.0}).y()) < 1e-14);
    CHECK(eval_field(ex.u_s, Vec2{s, 1.0}).norm() > 0.1);
  }

  // Analytic jet derivatives agree with finite differences.
  const Vec2 probes[] = {{0.31, 1.42}, {0.77, 1.11}, {0.52, 0.63}};
  for (const Vec2& p : probes) {
    check_jet_derivatives(ex.u_s.x, p);
    check_jet_derivatives(ex.u_s.y, p);
    check_jet_derivatives(ex.z_s.y, p);
    check_jet_derivatives(ex.p_s, p);
    check_jet_derivatives(ex.u_d.x, p);
    check_jet_derivatives(ex.z_d.x, p);
    check_jet_derivatives(ex.r_s, p);
    check_jet_derivatives(ex.r_d, p);
  }
}

TEST_CASE("derived data vanishes identically for the zero octet") {
  const ProblemData d = derive_data(zero_octet());
  const Vec2 pts[] = {{0.2, 1.5}, {0.8, 0.3}, {0.5, 1.0}};
  for (const Vec2& p : pts) {
    CHECK(d.f_s(p).norm() == 0.0);
    CHECK(d.f_d(p).norm() == 0.0);
    CHECK(d.g_s(p) == 0.0);
    CHECK(d.g_d(p) == 0.0);
    CHECK(d.gz_s(p) == 0.0);
    CHECK(d.gz_d(p) == 0.0);
    CHECK(d.u_star_s(p).norm() == 0.0);
    CHECK(d.u_star_d(p).norm() == 0.0);
    CHECK(d.j0(p) == 0.0);
    CHECK(d.j2(p) == 0.0);
    CHECK(d.j3(p) == 0.0);
    CHECK(d.j0z(p) == 0.0);
    CHECK(d.j2z(p) == 0.0);
    CHECK(d.j3z(p) == 0.0);
    CHECK(d.bc_u_s(p).norm() == 0.0);
    CHECK(d.bc_z_d(p).norm() == 0.0);
  }
}

TEST_CASE("derived data for a compactly supported free-flow stream field") {
  // u = curl ψ with ψ and its first two derivative orders vanishing on the
  // free-flow boundary; all other octet entries zero. Then every interface
  // residual vanishes, the divergence data vanish, the momentum source is
  // -μΔu, and the velocity target is u itself.
  const ExactFields ex = compact_stream_octet();
  const ProblemData d = derive_data(ex);

  for (int k = 0; k < 12; ++k) {
    const double s = (k + 0.5) / 12.0;
    const Vec2 on_interface{s, 1.0};
    CHECK(std::abs(d.j0(on_interface)) < 1e-14);
    CHECK(std::abs(d.j2(on_interface)) < 1e-14);
    CHECK(std::abs(d.j3(on_interface)) < 1e-14);
    CHECK(std::abs(d.j0z(on_interface)) < 1e-14);
    CHECK(std::abs(d.j2z(on_interface)) < 1e-14);
    CHECK(std::abs(d.j3z(on_interface)) < 1e-14);
  }

  std::mt19937 gen(99u);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(1.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    const Vec2 p{ux(gen), uy(gen)};
    CHECK(std::abs(d.g_s(p)) < 1e-13);
    const Jet u1 = eval_jet(ex.u_s.x, p), u2 = eval_jet(ex.u_s.y, p);
    const Vec2 lap{-ex.mu * (u1.dxx + u1.dyy), -ex.mu * (u2.dxx + u2.dyy)};
    CHECK((d.f_s(p) - lap).norm() < 1e-10 * (1.0 + lap.norm()));
    CHECK((d.u_star_s(p) - Vec2{u1.v, u2.v}).norm() < 1e-14);
  }
}

TEST_CASE("pressure bump perturbs only the free-flow momentum source") {
  const ExactFields base = trig_octet();
  const double lambda = 100.0;
  const ExactFields pert = add_pressure_bump(base, lambda);
  const ProblemData d0 = derive_data(base);
  const ProblemData d1 = derive_data(pert);
  const JetFn bump = pressure_bump();

  std::mt19937 gen(7u);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(1.0, 2.0),
      yd(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Vec2 ps{ux(gen), uy(gen)};
    const Vec2 pdp{ux(gen), yd(gen)};
    const Jet b = eval_jet(bump, ps);
    const Vec2 grad{lambda * b.dx, lambda * b.dy};
    CHECK((d1.f_s(ps) - d0.f_s(ps) - grad).norm() < 1e-11 * (1.0 + lambda));
    CHECK((d1.f_d(pdp) - d0.f_d(pdp)).norm() == 0.0);
    CHECK(d1.g_s(ps) == d0.g_s(ps));
    CHECK((d1.u_star_s(ps) - d0.u_star_s(ps)).norm() == 0.0);
    CHECK((d1.bc_u_s(ps) - d0.bc_u_s(ps)).norm() == 0.0);
  }
  // The bump vanishes on the interface together with its first derivatives,
  // so every interface residual is untouched.
  for (int k = 0; k < 10; ++k) {
    const double s = (k + 0.5) / 10.0;
    const Vec2 p{s, 1.0};
    CHECK(d1.j2(p) == doctest::Approx(d0.j2(p)).epsilon(1e-13));
    CHECK(d1.j3(p) == d0.j3(p));
    CHECK(d1.j0(p) == d0.j0(p));
  }
}

TEST_CASE("admissible velocity samples satisfy the discrete constraints") {
  Fixture fx(2);
  const auto samples =
      sample_admissible_fields(fx.mesh, fx.vel, fx.pressure, fx.trace, 5, 42u);
  REQUIRE(samples.size() == 5);
  const SpMat B = assemble_b(fx.mesh, fx.vel, fx.pressure);
  const SpMat C = assemble_interface_constraint(fx.mesh, fx.vel, fx.trace);
  for (const VecX& v : samples) {
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((B * v).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((C * v).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i < fx.stokes.ndof; ++i) {
      if (fx.stokes.boundary_dof[i]) CHECK(v[i] == 0.0);
    }
    for (int i = 0; i < fx.darcy.ndof; ++i) {
      if (fx.darcy.boundary_dof[i]) CHECK(v[fx.vel.darcy_offset() + i] == 0.0);
    }
  }
  // Deterministic for a fixed seed, different for another.
  const auto again =
      sample_admissible_fields(fx.mesh, fx.vel, fx.pressure, fx.trace, 5, 42u);
  CHECK((again[0] - samples[0]).norm() == 0.0);
  const auto other =
      sample_admissible_fields(fx.mesh, fx.vel, fx.pressure, fx.trace, 1, 43u);
  CHECK((other[0] - samples[0]).norm() > 1e-3);
}

TEST_CASE("weak residual of the optimality system vanishes on derived data") {
  Fixture fx(2);
  SUBCASE("trigonometric octet") {
    const WeakResidual r =
        weak_residual(fx.mesh, fx.vel, fx.pressure, fx.trace, trig_octet());
    CHECK(r.max_abs() < 1e-10);
  }
  SUBCASE("polynomial octet") {
    const WeakResidual r = weak_residual(fx.mesh, fx.vel, fx.pressure,
                                         fx.trace, polynomial_octet());
    CHECK(r.max_abs() < 1e-10);
  }
  SUBCASE("zero octet") {
    const WeakResidual r =
        weak_residual(fx.mesh, fx.vel, fx.pressure, fx.trace, zero_octet());
    CHECK(r.max_abs() == 0.0);
  }
  SUBCASE("bump-perturbed trigonometric octet") {
    const ExactFields ex = add_pressure_bump(trig_octet(), 1e4);
    const WeakResidual r =
        weak_residual(fx.mesh, fx.vel, fx.pressure, fx.trace, ex);
    CHECK(r.max_abs() < 1e-10 * 1e4);
  }
  SUBCASE("spaces from another mesh are rejected") {
    Fixture other(1);
    CHECK_THROWS_AS(weak_residual(other.mesh, fx.vel, fx.pressure, fx.trace,
                                  zero_octet()),
                    ArgumentError);
  }
}

TEST_CASE("error norms: exact zeros, interpolant accuracy, norm axioms") {
  Fixture fx(1);
  const int nv = fx.vel.ndof();
  const int np = fx.pressure.ndof;

  auto make_solution = [&](const VecX& u, const VecX& z, const VecX& p,
                           const VecX& r) {
    Solution s;
    s.u = u;
    s.z = z;
    s.p = p;
    s.r = r;
    s.eta = VecX::Zero(nv);  // cost evaluation needs a control field
    return s;
  };

  SUBCASE("zero discrete fields against the zero octet give exact zeros") {
    const Solution s = make_solution(VecX::Zero(nv), VecX::Zero(nv),
                                     VecX::Zero(np), VecX::Zero(np));
    const ErrorRow row =
        error_norms(fx.mesh, fx.vel, fx.pressure, s, zero_octet(),
                    SchemeTag::Classical);
    CHECK(row.u_x == 0.0);
    CHECK(row.z_x == 0.0);
    CHECK(row.p_l2 == 0.0);
    CHECK(row.r_l2 == 0.0);
    CHECK(row.cost == 0.0);
    CHECK(row.h == doctest::Approx(fx.mesh.h));
  }

  SUBCASE("solved polynomial octet measures at solver tolerance") {
    const ExactFields ex = polynomial_octet();
    const ProblemData data = derive_data(ex);
    const BlockSystem sys = build_system(fx.mesh, fx.vel, fx.pressure,
                                         fx.trace, data, SchemeTag::Classical);
    const Solution sol = solve(sys);
    const ErrorRow row = error_norms(fx.mesh, fx.vel, fx.pressure, sol, ex,
                                     SchemeTag::Classical);
    CHECK(row.u_x < 1e-8);
    CHECK(row.z_x < 1e-8);
    CHECK(row.p_l2 < 1e-8);
    CHECK(row.r_l2 < 1e-8);
    CHECK(row.u_grad_s < 1e-8);
    CHECK(row.u_l2_d < 1e-8);
    CHECK(row.u_div_d < 1e-8);
  }

  SUBCASE("norm axioms on random discrete fields") {
    std::mt19937 gen(7u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto rand_vec = [&](int n) {
      VecX v(n);
      for (int i = 0; i < n; ++i) v[i] = unif(gen);
      return v;
    };
    const Solution a = make_solution(rand_vec(nv), rand_vec(nv), rand_vec(np),
                                     rand_vec(np));
    const Solution b = make_solution(rand_vec(nv), rand_vec(nv), rand_vec(np),
                                     rand_vec(np));
    const Solution ab = make_solution(a.u + b.u, a.z + b.z, a.p + b.p,
                                      a.r + b.r);
    const Solution a2 = make_solution(2.0 * a.u, 2.0 * a.z, 2.0 * a.p,
                                      2.0 * a.r);
    const ExactFields zero = zero_octet();
    const ErrorRow ea =
        error_norms(fx.mesh, fx.vel, fx.pressure, a, zero, SchemeTag::Classical);
    const ErrorRow eb =
        error_norms(fx.mesh, fx.vel, fx.pressure, b, zero, SchemeTag::Classical);
    const ErrorRow eab = error_norms(fx.mesh, fx.vel, fx.pressure, ab, zero,
                                     SchemeTag::Classical);
    const ErrorRow ea2 = error_norms(fx.mesh, fx.vel, fx.pressure, a2, zero,
                                     SchemeTag::Classical);
    CHECK(ea.u_x > 0.0);
    CHECK(eab.u_x <= ea.u_x + eb.u_x + 1e-12);
    CHECK(eab.z_x <= ea.z_x + eb.z_x + 1e-12);
    CHECK(eab.p_l2 <= ea.p_l2 + eb.p_l2 + 1e-12);
    CHECK(ea2.u_x == doctest::Approx(2.0 * ea.u_x).epsilon(1e-12));
    CHECK(ea2.p_l2 == doctest::Approx(2.0 * ea.p_l2).epsilon(1e-12));
  }

  SUBCASE("mismatched solution sizes are rejected") {
    Solution s = make_solution(VecX::Zero(nv - 1), VecX::Zero(nv),
                               VecX::Zero(np), VecX::Zero(np));
    CHECK_THROWS_AS(error_norms(fx.mesh, fx.vel, fx.pressure, s, zero_octet(),
                                SchemeTag::Classical),
                    ArgumentError);
    Fixture other(2);
    const Solution z = make_solution(VecX::Zero(nv), VecX::Zero(nv),
                                     VecX::Zero(np), VecX::Zero(np));
    CHECK_THROWS_AS(error_norms(other.mesh, fx.vel, fx.pressure, z,
                                zero_octet(), SchemeTag::Classical),
                    ArgumentError);
  }
}

TEST_CASE("convergence study: graph-norm rates approach second order") {
  const ExactFields ex = trig_octet();
  for (const SchemeTag scheme : {SchemeTag::Classical, SchemeTag::Robust}) {
    CAPTURE(scheme == SchemeTag::Classical ? "classical" : "robust");
    const ConvergenceReport rep =
        convergence_study(kStokesRect, kDarcyRect, 1, 4, ex, scheme);
    REQUIRE(rep.rows.size() == 4);
    REQUIRE(rep.eoc_u.size() == 3);
    for (std::size_t l = 0; l + 1 < rep.rows.size(); ++l) {
      CHECK(rep.rows[l + 1].h ==
            doctest::Approx(0.5 * rep.rows[l].h).epsilon(1e-12));
      CHECK(rep.rows[l + 1].u_x < rep.rows[l].u_x);
      CHECK(rep.rows[l + 1].z_x < rep.rows[l].z_x);
      CHECK(rep.rows[l + 1].p_l2 < rep.rows[l].p_l2);
      CHECK(rep.rows[l + 1].r_l2 < rep.rows[l].r_l2);
    }
    // Measured orders on these meshes: the state velocity converges close
    // to second order on every step; the wilder adjoint fields start
    // pre-asymptotic and climb toward second order under refinement.
    for (const double o : rep.eoc_u) CHECK((o > 1.5 && o < 2.5));
    CHECK(rep.eoc_z.front() > 0.9);
    CHECK((rep.eoc_z.back() > 1.5 && rep.eoc_z.back() < 2.5));
    CHECK(rep.eoc_p.back() > 1.4);
    CHECK(rep.eoc_r.back() > 1.1);
    for (const ErrorRow& row : rep.rows) {
      CHECK(std::isfinite(row.cost));
      CHECK(row.cost > 0.0);
    }
  }

  SUBCASE("polynomial-exact data yields the not-a-number order sentinel") {
    const ConvergenceReport rep = convergence_study(
        kStokesRect, kDarcyRect, 1, 3, polynomial_octet(), SchemeTag::Classical);
    for (const ErrorRow& row : rep.rows) CHECK(row.u_x < 1e-8);
    for (const double o : rep.eoc_u) CHECK(std::isnan(o));
    for (const double o : rep.eoc_p) CHECK(std::isnan(o));
  }

  SUBCASE("fewer than three levels is an argument error") {
    CHECK_THROWS_AS(
        convergence_study(kStokesRect, kDarcyRect, 1, 2, ex,
                          SchemeTag::Classical),
        ArgumentError);
    CHECK_THROWS_AS(
        convergence_study(kStokesRect, kDarcyRect, 0, 3, ex,
                          SchemeTag::Classical),
        ArgumentError);
  }
}

TEST_CASE("robustness experiment: pressure perturbation response") {
  // A gentle octet keeps the unperturbed discretization error small enough
  // that the classical scheme's perturbation response stands out above it.
  const ExactFields ex = scale_octet(trig_octet(), 0.05);
  const std::vector<double> scales{0.0, 1.0, 1e2, 1e4};
  const RobustnessReport rep = robustness_experiment(
      kStokesRect, kDarcyRect, 1, 1, ex, pressure_bump(), scales);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.baseline_classical > 0.0);
  CHECK(rep.baseline_robust > 0.0);

  // Scale zero reproduces the baselines exactly.
  CHECK(rep.rows[0].lambda == 0.0);
  CHECK(rep.rows[0].classical_u_x == rep.baseline_classical);
  CHECK(rep.rows[0].robust_u_x == rep.baseline_robust);
  CHECK(rep.rows[0].robust_drift == 0.0);

  for (const RobustnessRow& row : rep.rows) {
    CAPTURE(row.lambda);
    // The reconstruction scheme never feels the perturbation: error stays
    // within 1e-6 relative of baseline, coefficients within 1e-8 * lambda.
    CHECK(std::abs(row.robust_u_x - rep.baseline_robust) <
          1e-6 * rep.baseline_robust);
    if (row.lambda > 0.0) {
      CHECK(row.robust_drift < 1e-8 * row.lambda);
    }
  }
  // The classical scheme degrades with the perturbation scale: growing
  // from lambda = 1 on, and by a regression-frozen factor of about 18
  // between lambda = 1 and lambda = 1e4 on this mesh.
  CHECK(rep.rows[3].classical_u_x >= 10.0 * rep.rows[1].classical_u_x);
  CHECK(rep.rows[3].classical_u_x / rep.rows[1].classical_u_x ==
        doctest::Approx(18.08).epsilon(0.15));
  CHECK(rep.rows[3].classical_u_x > rep.rows[2].classical_u_x);
  CHECK(rep.rows[2].classical_u_x > rep.rows[1].classical_u_x);

  SUBCASE("profiles reaching the free-flow boundary are rejected") {
    const JetFn leaky = [](const Jet& x, const Jet& y) {
      return sin(M_PI * x) * y;
    };
    CHECK_THROWS_AS(robustness_experiment(kStokesRect, kDarcyRect, 1, 0, ex,
                                          leaky, scales),
                    ArgumentError);
    // Shifted bump overlapping the interface side of the box.
    const JetFn shifted = [](const Jet& x, const Jet& y) {
      return pow_int(x, 2) * pow_int(1.0 - x, 2) * pow_int(y - 0.5, 2) *
             pow_int(1.5 - y, 2);
    };
    CHECK_THROWS_AS(robustness_experiment(kStokesRect, kDarcyRect, 1, 0, ex,
                                          shifted, scales),
                    ArgumentError);
    CHECK_THROWS_AS(robustness_experiment(kStokesRect, kDarcyRect, 1, 0, ex,
                                          JetFn{}, scales),
                    ArgumentError);
    CHECK_THROWS_AS(robustness_experiment(kStokesRect, kDarcyRect, 0, 0, ex,
                                          pressure_bump(), scales),
                    ArgumentError);
    CHECK_THROWS_AS(robustness_experiment(kStokesRect, kDarcyRect, 1, -1, ex,
                                          pressure_bump(), scales),
                    ArgumentError);
  }

  SUBCASE("table writers emit one data row per entry") {
    std::ostringstream conv_out;
    const ConvergenceReport conv = convergence_study(
        kStokesRect, kDarcyRect, 1, 3, polynomial_octet(), SchemeTag::Classical);
    write_convergence_csv(conv, conv_out);
    std::istringstream conv_in(conv_out.str());
    std::string line;
    int lines = 0;
    std::getline(conv_in, line);
    CHECK(line ==
          "level,h,u_grad_s,u_l2_d,u_div_d,u_x,z_grad_s,z_l2_d,z_div_d,z_x,"
          "p_l2,r_l2,cost,eoc_u,eoc_z,eoc_p,eoc_r");
    while (std::getline(conv_in, line)) ++lines;
    CHECK(lines == 3);

    std::ostringstream rob_out;
    write_robustness_csv(rep, rob_out);
    std::istringstream rob_in(rob_out.str());
    std::getline(rob_in, line);
    CHECK(line ==
          "lambda,classical_u_x,robust_u_x,classical_ratio,robust_rel_change,"
          "robust_drift");
    lines = 0;
    while (std::getline(rob_in, line)) ++lines;
    CHECK(lines == 4);
  }
}
