#ifndef SDOPT_FE_FUNCTION_HPP
#define SDOPT_FE_FUNCTION_HPP

#include "sdopt/spaces.hpp"
#include "sdopt/types.hpp"

namespace sdopt {

/// A discrete field: one coefficient per global dof of its space. The
/// coefficient length must equal the space's dof count; evaluation anywhere
/// inside a member triangle is well-defined.
struct FeFunction {
  const Space* space = nullptr;
  VecX coeffs;
};

/// Value of a vector-valued field (StokesVelocity or DarcyVelocity).
Vec2 eval_velocity(const FeFunction& f, int tri, const Vec2& ref);

/// Physical gradient G(c, d) = ∂u_c/∂x_d (StokesVelocity only).
Mat2 eval_gradient(const FeFunction& f, int tri, const Vec2& ref);

/// Divergence of a vector-valued field.
double eval_divergence(const FeFunction& f, int tri, const Vec2& ref);

/// Value of a scalar field (Pressure).
double eval_scalar(const FeFunction& f, int tri, const Vec2& ref);

}  // namespace sdopt

#endif  // SDOPT_FE_FUNCTION_HPP
