#ifndef SDOPT_JET_HPP
#define SDOPT_JET_HPP

#include <cmath>

namespace sdopt {

/// Second-order Taylor jet of a scalar function of (x, y): carries the value
/// together with exact first and second partial derivatives. Arithmetic on
/// jets propagates derivatives by the chain rule, so closed-form fields
/// written once as jet expressions expose value, gradient, and Hessian with
/// no hand differentiation and no finite-difference noise.
template <typename T>
struct Jet2 {
  T v{};    // value
  T dx{};   // ∂/∂x
  T dy{};   // ∂/∂y
  T dxx{};  // ∂²/∂x²
  T dxy{};  // ∂²/∂x∂y
  T dyy{};  // ∂²/∂y²

  Jet2() = default;
  // NOLINTNEXTLINEBEGIN -- implicit lift of constants into jets is the point
  Jet2(T value) : v(value) {}
  Jet2(T value, T gx, T gy, T hxx, T hxy, T hyy)
      : v(value), dx(gx), dy(gy), dxx(hxx), dxy(hxy), dyy(hyy) {}

  /// Seed for the x coordinate at (x0, y0).
  static Jet2 var_x(T x0) { return {x0, T(1), T(0), T(0), T(0), T(0)}; }
  /// Seed for the y coordinate at (x0, y0).
  static Jet2 var_y(T y0) { return {y0, T(0), T(1), T(0), T(0), T(0)}; }
};

template <typename T>
Jet2<T> operator+(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.v + b.v, a.dx + b.dx, a.dy + b.dy,
          a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}

template <typename T>
Jet2<T> operator-(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.v - b.v, a.dx - b.dx, a.dy - b.dy,
          a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}

template <typename T>
Jet2<T> operator-(const Jet2<T>& a) {
  return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy};
}

template <typename T>
Jet2<T> operator*(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.v * b.v,
          a.dx * b.v + a.v * b.dx,
          a.dy * b.v + a.v * b.dy,
          a.dxx * b.v + T(2) * a.dx * b.dx + a.v * b.dxx,
          a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
          a.dyy * b.v + T(2) * a.dy * b.dy + a.v * b.dyy};
}

template <typename T>
Jet2<T> operator*(T s, const Jet2<T>& a) {
  return {s * a.v, s * a.dx, s * a.dy, s * a.dxx, s * a.dxy, s * a.dyy};
}

template <typename T>
Jet2<T> operator*(const Jet2<T>& a, T s) {
  return s * a;
}

template <typename T>
Jet2<T> operator+(T s, const Jet2<T>& a) {
  return Jet2<T>(s) + a;
}

template <typename T>
Jet2<T> operator+(const Jet2<T>& a, T s) {
  return a + Jet2<T>(s);
}

template <typename T>
Jet2<T> operator-(T s, const Jet2<T>& a) {
  return Jet2<T>(s) - a;
}

template <typename T>
Jet2<T> operator-(const Jet2<T>& a, T s) {
  return a - Jet2<T>(s);
}

/// Composition with a univariate g given g(v), g'(v), g''(v).
template <typename T>
Jet2<T> compose(const Jet2<T>& a, T g, T g1, T g2) {
  return {g,
          g1 * a.dx,
          g1 * a.dy,
          g2 * a.dx * a.dx + g1 * a.dxx,
          g2 * a.dx * a.dy + g1 * a.dxy,
          g2 * a.dy * a.dy + g1 * a.dyy};
}

template <typename T>
Jet2<T> sin(const Jet2<T>& a) {
  using std::cos;
  using std::sin;
  return compose(a, sin(a.v), cos(a.v), -sin(a.v));
}

template <typename T>
Jet2<T> cos(const Jet2<T>& a) {
  using std::cos;
  using std::sin;
  return compose(a, cos(a.v), -sin(a.v), -cos(a.v));
}

template <typename T>
Jet2<T> exp(const Jet2<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return compose(a, e, e, e);
}

/// Integer power by repeated multiplication (n ≥ 0).
template <typename T>
Jet2<T> pow_int(const Jet2<T>& a, int n) {
  Jet2<T> r(T(1));
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

template <typename T>
Jet2<T> operator/(const Jet2<T>& a, const Jet2<T>& b) {
  const T inv = T(1) / b.v;
  return a * compose(b, inv, -inv * inv, T(2) * inv * inv * inv);
}

using Jet = Jet2<double>;

}  // namespace sdopt

#endif  // SDOPT_JET_HPP
