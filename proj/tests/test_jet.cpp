#include <cmath>

#include "doctest.h"
#include "sdopt/jet.hpp"

using sdopt::Jet;

namespace {
constexpr double kTol = 1e-14;
}

TEST_CASE("jet reproduces hand derivatives of sin(x)exp(y) + x^2 y") {
  const double x0 = 0.3, y0 = -0.4;
  const Jet x = Jet::var_x(x0);
  const Jet y = Jet::var_y(y0);
  const Jet f = sin(x) * exp(y) + x * x * y;

  const double s = std::sin(x0), c = std::cos(x0), e = std::exp(y0);
  CHECK(f.v == doctest::Approx(s * e + x0 * x0 * y0).epsilon(kTol));
  CHECK(f.dx == doctest::Approx(c * e + 2 * x0 * y0).epsilon(kTol));
  CHECK(f.dy == doctest::Approx(s * e + x0 * x0).epsilon(kTol));
  CHECK(f.dxx == doctest::Approx(-s * e + 2 * y0).epsilon(kTol));
  CHECK(f.dxy == doctest::Approx(c * e + 2 * x0).epsilon(kTol));
  CHECK(f.dyy == doctest::Approx(s * e).epsilon(kTol));
}

TEST_CASE("jet division matches quotient-rule derivatives of x/(1+y^2)") {
  const double x0 = 0.7, y0 = 1.3;
  const Jet f = Jet::var_x(x0) / (1.0 + Jet::var_y(y0) * Jet::var_y(y0));

  const double q = 1.0 + y0 * y0;
  CHECK(f.v == doctest::Approx(x0 / q).epsilon(kTol));
  CHECK(f.dx == doctest::Approx(1.0 / q).epsilon(kTol));
  CHECK(f.dy == doctest::Approx(-2 * x0 * y0 / (q * q)).epsilon(kTol));
  CHECK(f.dxx == doctest::Approx(0.0).epsilon(kTol));
  CHECK(f.dxy == doctest::Approx(-2 * y0 / (q * q)).epsilon(kTol));
  CHECK(f.dyy ==
        doctest::Approx(x0 * (-2 / (q * q) + 8 * y0 * y0 / (q * q * q)))
            .epsilon(kTol));
}

TEST_CASE("jet cosine of a product") {
  const double x0 = 0.9, y0 = -1.1;
  const Jet f = cos(Jet::var_x(x0) * Jet::var_y(y0));

  const double s = std::sin(x0 * y0), c = std::cos(x0 * y0);
  CHECK(f.v == doctest::Approx(c).epsilon(kTol));
  CHECK(f.dx == doctest::Approx(-s * y0).epsilon(kTol));
  CHECK(f.dy == doctest::Approx(-s * x0).epsilon(kTol));
  CHECK(f.dxx == doctest::Approx(-c * y0 * y0).epsilon(kTol));
  CHECK(f.dxy == doctest::Approx(-s - c * x0 * y0).epsilon(kTol));
  CHECK(f.dyy == doctest::Approx(-c * x0 * x0).epsilon(kTol));
}

TEST_CASE("jet integer power expands (x + 2y)^3") {
  const double x0 = 0.25, y0 = 0.5;
  const Jet f = pow_int(Jet::var_x(x0) + 2.0 * Jet::var_y(y0), 3);

  const double u = x0 + 2 * y0;
  CHECK(f.v == doctest::Approx(u * u * u).epsilon(kTol));
  CHECK(f.dx == doctest::Approx(3 * u * u).epsilon(kTol));
  CHECK(f.dy == doctest::Approx(6 * u * u).epsilon(kTol));
  CHECK(f.dxx == doctest::Approx(6 * u).epsilon(kTol));
  CHECK(f.dxy == doctest::Approx(12 * u).epsilon(kTol));
  CHECK(f.dyy == doctest::Approx(24 * u).epsilon(kTol));
}
