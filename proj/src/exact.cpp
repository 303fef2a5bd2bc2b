#include <cmath>
#include <memory>

#include "sdopt/verify.hpp"

namespace sdopt {

Jet eval_jet(const JetFn& f, const Vec2& p) {
  if (!f) return Jet{};
  return f(Jet::var_x(p.x()), Jet::var_y(p.y()));
}

Vec2 eval_field(const JetField& f, const Vec2& p) {
  return {eval_jet(f.x, p).v, eval_jet(f.y, p).v};
}

namespace {

Mat2 permeability_at(const ExactFields& ex, const Vec2& p) {
  return ex.K ? ex.K(p) : Mat2(Mat2::Identity());
}

// Canonical interface geometry: free-flow box above the porous box, so the
// free-flow-side normal is (0,-1) and the tangent (1,0).
constexpr double kNx = 0.0, kNy = -1.0;
constexpr double kTx = 1.0, kTy = 0.0;

}  // namespace

ExactFields trig_octet() {
  ExactFields ex;
  ex.mu = 1.0;
  ex.alpha1 = 1.0;
  ex.alpha = 1.0;
  ex.K = [](const Vec2&) {
    Mat2 K;
    K << 1.5, 0.2, 0.2, 1.0;
    return K;
  };

  // Free-flow state velocity: curl of sin(pi x)(2-y)^2 — solenoidal with
  // zero normal trace on the outer free-flow boundary, nonzero on the
  // interface.
  ex.u_s.x = [](const Jet& x, const Jet& y) {
    return -2.0 * (2.0 - y) * sin(M_PI * x);
  };
  ex.u_s.y = [](const Jet& x, const Jet& y) {
    return -M_PI * cos(M_PI * x) * pow_int(2.0 - y, 2);
  };
  ex.u_d.x = [](const Jet& x, const Jet& y) {
    return 0.3 * sin(M_PI * x) * sin(M_PI * y) + 0.1;
  };
  ex.u_d.y = [](const Jet& x, const Jet& y) {
    return 0.2 * cos(M_PI * x) * cos(M_PI * y) - 0.15;
  };
  ex.p_s = [](const Jet& x, const Jet& y) {
    return 0.7 * cos(M_PI * x) * (1.0 + 0.5 * y);
  };
  ex.p_d = [](const Jet& x, const Jet& y) {
    return 0.5 * sin(M_PI * x) + 0.3 * (y - 0.5);
  };

  // Rescaled adjoint velocity: curl of sin(2 pi x) zeta(y) with
  // zeta = (2-y)^2 (y-1/4); zeta' = (2-y)(2.5-3y).
  ex.z_s.x = [](const Jet& x, const Jet& y) {
    return sin(2.0 * M_PI * x) * ((2.0 - y) * (2.5 - 3.0 * y));
  };
  ex.z_s.y = [](const Jet& x, const Jet& y) {
    return -2.0 * M_PI * cos(2.0 * M_PI * x) *
           (pow_int(2.0 - y, 2) * (y - 0.25));
  };
  ex.z_d.x = [](const Jet& x, const Jet& y) {
    return 0.2 * sin(M_PI * y) * cos(M_PI * x);
  };
  ex.z_d.y = [](const Jet& x, const Jet& y) {
    return -0.1 * cos(M_PI * y) * sin(M_PI * x) + 0.05;
  };
  ex.r_s = [](const Jet& x, const Jet& y) {
    return 0.4 * sin(M_PI * x) * cos(0.5 * M_PI * y);
  };
  ex.r_d = [](const Jet& x, const Jet& y) {
    return 0.25 * cos(M_PI * x) + 0.2 * y * y;
  };
  return ex;
}

ExactFields polynomial_octet() {
  ExactFields ex;
  ex.mu = 1.3;
  ex.alpha1 = 0.8;
  ex.alpha = 0.64;
  ex.K = [](const Vec2&) {
    Mat2 K;
    K << 1.5, 0.2, 0.2, 1.0;
    return K;
  };

  ex.u_s.x = [](const Jet& x, const Jet& y) {
    return 1.0 + x * x + 2.0 * x * y - y;
  };
  ex.u_s.y = [](const Jet& x, const Jet& y) {
    return 2.0 - x * x + y * y - 2.0 * x * y;
  };
  // Porous fields of the form [P1]^2 + (x, y) q with linear q, the exact
  // local shape of the porous space.
  ex.u_d.x = [](const Jet& x, const Jet& y) {
    return 0.2 + 0.3 * x - 0.1 * y + x * (x - 0.5 * y);
  };
  ex.u_d.y = [](const Jet& x, const Jet& y) {
    return -0.15 + 0.25 * x + 0.4 * y + y * (x - 0.5 * y);
  };
  ex.p_s = [](const Jet& x, const Jet& y) { return 0.3 * x - 0.2 * y + 0.1; };
  ex.p_d = [](const Jet& x, const Jet& y) { return -0.2 * x + 0.5 * y - 0.4; };

  ex.z_s.x = [](const Jet& x, const Jet& y) {
    return 0.1 * x * x - 0.3 * y + 0.2 * x * y;
  };
  ex.z_s.y = [](const Jet& x, const Jet& y) {
    return 0.4 * y * y - 0.1 * x + 0.3;
  };
  ex.z_d.x = [](const Jet& x, const Jet& y) {
    return 0.1 - 0.2 * x + 0.3 * y + x * (-0.4 * x + 0.2 * y);
  };
  ex.z_d.y = [](const Jet& x, const Jet& y) {
    return 0.25 + 0.15 * x - 0.35 * y + y * (-0.4 * x + 0.2 * y);
  };
  ex.r_s = [](const Jet& x, const Jet& y) {
    return -0.1 * x + 0.45 * y + 0.2;
  };
  ex.r_d = [](const Jet& x, const Jet& y) {
    return 0.35 * x + 0.15 * y - 0.3;
  };
  return ex;
}

ExactFields zero_octet() { return ExactFields{}; }

JetFn pressure_bump() {
  return [](const Jet& x, const Jet& y) {
    return pow_int(x, 2) * pow_int(1.0 - x, 2) * pow_int(y - 1.0, 2) *
           pow_int(2.0 - y, 2);
  };
}

ExactFields add_pressure_perturbation(const ExactFields& base,
                                      const JetFn& phi, double lambda) {
  ExactFields out = base;
  const JetFn old = base.p_s;
  out.p_s = [old, phi, lambda](const Jet& x, const Jet& y) {
    Jet v = lambda * phi(x, y);
    if (old) v = v + old(x, y);
    return v;
  };
  return out;
}

ExactFields add_pressure_bump(const ExactFields& base, double lambda) {
  return add_pressure_perturbation(base, pressure_bump(), lambda);
}

ExactFields scale_octet(const ExactFields& base, double factor) {
  const auto scale = [factor](const JetFn& f) -> JetFn {
    if (!f) return {};
    return [f, factor](const Jet& x, const Jet& y) { return factor * f(x, y); };
  };
  ExactFields out = base;
  out.u_s = {scale(base.u_s.x), scale(base.u_s.y)};
  out.u_d = {scale(base.u_d.x), scale(base.u_d.y)};
  out.z_s = {scale(base.z_s.x), scale(base.z_s.y)};
  out.z_d = {scale(base.z_d.x), scale(base.z_d.y)};
  out.p_s = scale(base.p_s);
  out.p_d = scale(base.p_d);
  out.r_s = scale(base.r_s);
  out.r_d = scale(base.r_d);
  return out;
}

ProblemData derive_data(const ExactFields& exact) {
  auto ex = std::make_shared<const ExactFields>(exact);
  ProblemData d;
  d.mu = ex->mu;
  d.alpha1 = ex->alpha1;
  d.alpha = ex->alpha;
  d.K = ex->K;
  const double mu = ex->mu;
  const double ainv = 1.0 / std::sqrt(ex->alpha);
  const double sqa = std::sqrt(ex->alpha);

  // Momentum sources: the strong state equations evaluated on the octet.
  d.f_s = [ex, mu, ainv](const Vec2& p) {
    const Jet u1 = eval_jet(ex->u_s.x, p), u2 = eval_jet(ex->u_s.y, p);
    const Jet ps = eval_jet(ex->p_s, p);
    const Vec2 z = eval_field(ex->z_s, p);
    return Vec2{-mu * (2.0 * u1.dxx + u1.dyy + u2.dxy) + ps.dx + ainv * z.x(),
                -mu * (u2.dxx + 2.0 * u2.dyy + u1.dxy) + ps.dy + ainv * z.y()};
  };
  d.f_d = [ex, mu, ainv](const Vec2& p) {
    const Mat2 Kinv = permeability_at(*ex, p).inverse();
    const Vec2 u = eval_field(ex->u_d, p);
    const Jet pd = eval_jet(ex->p_d, p);
    const Vec2 z = eval_field(ex->z_d, p);
    return Vec2(mu * (Kinv * u) + Vec2{pd.dx, pd.dy} + ainv * z);
  };

  d.g_s = [ex](const Vec2& p) {
    return eval_jet(ex->u_s.x, p).dx + eval_jet(ex->u_s.y, p).dy;
  };
  d.g_d = [ex](const Vec2& p) {
    return eval_jet(ex->u_d.x, p).dx + eval_jet(ex->u_d.y, p).dy;
  };
  d.gz_s = [ex](const Vec2& p) {
    return eval_jet(ex->z_s.x, p).dx + eval_jet(ex->z_s.y, p).dy;
  };
  d.gz_d = [ex](const Vec2& p) {
    return eval_jet(ex->z_d.x, p).dx + eval_jet(ex->z_d.y, p).dy;
  };

  // Velocity target: the strong adjoint equations solved for u*.
  d.u_star_s = [ex, mu, sqa](const Vec2& p) {
    const Jet z1 = eval_jet(ex->z_s.x, p), z2 = eval_jet(ex->z_s.y, p);
    const Jet rs = eval_jet(ex->r_s, p);
    const Vec2 u = eval_field(ex->u_s, p);
    const Vec2 res{-mu * (2.0 * z1.dxx + z1.dyy + z2.dxy) + rs.dx,
                   -mu * (z2.dxx + 2.0 * z2.dyy + z1.dxy) + rs.dy};
    return Vec2(u - sqa * res);
  };
  d.u_star_d = [ex, mu, sqa](const Vec2& p) {
    const Mat2 Kinv = permeability_at(*ex, p).inverse();
    const Vec2 z = eval_field(ex->z_d, p);
    const Jet rd = eval_jet(ex->r_d, p);
    const Vec2 u = eval_field(ex->u_d, p);
    return Vec2(u - sqa * Vec2(mu * (Kinv * z) + Vec2{rd.dx, rd.dy}));
  };

  // Interface residuals in stress units on the canonical layout.
  d.j0 = [ex](const Vec2& p) {
    const Vec2 us = eval_field(ex->u_s, p);
    const Vec2 ud = eval_field(ex->u_d, p);
    return us.x() * kNx + us.y() * kNy - (ud.x() * kNx + ud.y() * kNy);
  };
  d.j2 = [ex, mu](const Vec2& p) {
    const Jet u2 = eval_jet(ex->u_s.y, p);
    return 2.0 * mu * u2.dy - eval_jet(ex->p_s, p).v + eval_jet(ex->p_d, p).v;
  };
  d.j3 = [ex, mu](const Vec2& p) {
    const Jet u1 = eval_jet(ex->u_s.x, p), u2 = eval_jet(ex->u_s.y, p);
    const Vec2 tau{kTx, kTy};
    const double kappa = tau.dot(permeability_at(*ex, p) * tau);
    return -mu * (u1.dy + u2.dx) +
           ex->alpha1 * mu / std::sqrt(kappa) * u1.v;
  };
  d.j0z = [ex](const Vec2& p) {
    const Vec2 zs = eval_field(ex->z_s, p);
    const Vec2 zd = eval_field(ex->z_d, p);
    return zs.x() * kNx + zs.y() * kNy - (zd.x() * kNx + zd.y() * kNy);
  };
  d.j2z = [ex, mu](const Vec2& p) {
    const Jet z2 = eval_jet(ex->z_s.y, p);
    return 2.0 * mu * z2.dy - eval_jet(ex->r_s, p).v + eval_jet(ex->r_d, p).v;
  };
  d.j3z = [ex, mu](const Vec2& p) {
    const Jet z1 = eval_jet(ex->z_s.x, p), z2 = eval_jet(ex->z_s.y, p);
    const Vec2 tau{kTx, kTy};
    const double kappa = tau.dot(permeability_at(*ex, p) * tau);
    return -mu * (z1.dy + z2.dx) +
           ex->alpha1 * mu / std::sqrt(kappa) * z1.v;
  };

  d.bc_u_s = [ex](const Vec2& p) { return eval_field(ex->u_s, p); };
  d.bc_u_d = [ex](const Vec2& p) { return eval_field(ex->u_d, p); };
  d.bc_z_s = [ex](const Vec2& p) { return eval_field(ex->z_s, p); };
  d.bc_z_d = [ex](const Vec2& p) { return eval_field(ex->z_d, p); };
  return d;
}

}  // namespace sdopt
