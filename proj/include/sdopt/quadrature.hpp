#ifndef SDOPT_QUADRATURE_HPP
#define SDOPT_QUADRATURE_HPP

#include <vector>

#include "sdopt/types.hpp"

namespace sdopt {

enum class QuadDomain { Triangle, Edge };

/// Quadrature rule on a reference domain: the unit triangle
/// {(x,y) : x,y ≥ 0, x + y ≤ 1} or the unit interval [0,1]. Triangle rules
/// store (x, y) reference coordinates with weights summing to 1/2; edge rules
/// store the parameter t with weights summing to 1. All weights positive.
struct QuadratureRule {
  QuadDomain domain;
  int degree;                 // polynomial degree integrated exactly
  std::vector<Vec2> points;   // edge rules use only x()
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Build a rule exact for all polynomials up to `degree` on the requested
/// reference domain. Supported degrees: 1..10.
QuadratureRule make_quadrature(QuadDomain domain, int degree);

/// Composite refinement of a reference rule: the reference domain is split
/// uniformly `levels` times (each triangle into 4 children, each interval
/// into 2), and the base rule is mapped into every cell. Degree of exactness
/// is unchanged; accuracy for smooth non-polynomial integrands improves
/// geometrically. Used by verification oracles that need integrals well
/// beyond assembly accuracy.
QuadratureRule composite_rule(const QuadratureRule& base, int levels);

/// Gauss-Legendre nodes/weights on [0,1] (exact through degree 2n−1).
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace sdopt

#endif  // SDOPT_QUADRATURE_HPP
