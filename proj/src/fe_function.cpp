#include "sdopt/fe_function.hpp"

namespace sdopt {

namespace {

void require(const FeFunction& f, SpaceKind kind, const char* what) {
  if (f.space == nullptr || f.coeffs.size() != f.space->ndof) {
    throw ArgumentError("fe_function: coefficient length does not match the "
                        "space dof count");
  }
  if (f.space->kind != kind) throw ArgumentError(what);
}

}  // namespace

Vec2 eval_velocity(const FeFunction& f, int tri, const Vec2& ref) {
  if (f.space == nullptr || f.coeffs.size() != f.space->ndof) {
    throw ArgumentError("fe_function: coefficient length does not match the "
                        "space dof count");
  }
  const auto& cd = f.space->cell_dofs[tri];
  const BasisEval eb = eval_basis(*f.space, tri, ref);
  Vec2 v = Vec2::Zero();
  if (f.space->kind == SpaceKind::StokesVelocity) {
    for (int i = 0; i < 7; ++i) {
      v.x() += f.coeffs[cd[2 * i]] * eb.values(i, 0);
      v.y() += f.coeffs[cd[2 * i + 1]] * eb.values(i, 0);
    }
  } else if (f.space->kind == SpaceKind::DarcyVelocity) {
    for (int i = 0; i < 8; ++i) {
      v += f.coeffs[cd[i]] * eb.values.row(i).transpose();
    }
  } else {
    throw ArgumentError("eval_velocity: space is not vector-valued");
  }
  return v;
}

Mat2 eval_gradient(const FeFunction& f, int tri, const Vec2& ref) {
  require(f, SpaceKind::StokesVelocity,
          "eval_gradient: defined for the continuous velocity space only");
  const auto& cd = f.space->cell_dofs[tri];
  const BasisEval eb = eval_basis(*f.space, tri, ref);
  Mat2 g = Mat2::Zero();
  for (int i = 0; i < 7; ++i) {
    g.row(0) += f.coeffs[cd[2 * i]] * eb.gradients.row(i);
    g.row(1) += f.coeffs[cd[2 * i + 1]] * eb.gradients.row(i);
  }
  return g;
}

double eval_divergence(const FeFunction& f, int tri, const Vec2& ref) {
  if (f.space != nullptr && f.space->kind == SpaceKind::StokesVelocity) {
    return eval_gradient(f, tri, ref).trace();
  }
  require(f, SpaceKind::DarcyVelocity,
          "eval_divergence: defined for velocity spaces only");
  const auto& cd = f.space->cell_dofs[tri];
  const BasisEval eb = eval_basis(*f.space, tri, ref);
  double d = 0;
  for (int i = 0; i < 8; ++i) d += f.coeffs[cd[i]] * eb.divergence[i];
  return d;
}

double eval_scalar(const FeFunction& f, int tri, const Vec2& ref) {
  require(f, SpaceKind::Pressure,
          "eval_scalar: defined for the pressure space only");
  const auto& cd = f.space->cell_dofs[tri];
  const BasisEval eb = eval_basis(*f.space, tri, ref);
  double v = 0;
  for (int i = 0; i < 3; ++i) v += f.coeffs[cd[i]] * eb.values(i, 0);
  return v;
}

}  // namespace sdopt
