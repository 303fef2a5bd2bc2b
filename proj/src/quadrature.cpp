#include "sdopt/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sdopt {

namespace {

// Golub-Welsch: nodes/weights of the n-point Gauss rule for the Jacobi weight
// (1−x)^a (1+x)^b on [−1,1], from the symmetric tridiagonal recurrence matrix.
void gauss_jacobi(int n, double a, double b, std::vector<double>& x,
                  std::vector<double>& w) {
  MatX J = MatX::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double kk = k;
    const double denom = (2 * kk + a + b) * (2 * kk + a + b + 2);
    J(k, k) = (denom == 0.0) ? (b - a) / (a + b + 2)
                             : (b * b - a * a) / denom;
    if (k > 0) {
      const double s = 2 * kk + a + b;
      const double num = 4 * kk * (kk + a) * (kk + b) * (kk + a + b);
      const double den = s * s * (s + 1) * (s - 1);
      const double beta = std::sqrt(num / den);
      J(k, k - 1) = beta;
      J(k - 1, k) = beta;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(J);
  const double mu0 = std::pow(2.0, a + b + 1) * std::tgamma(a + 1) *
                     std::tgamma(b + 1) / std::tgamma(a + b + 2);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    x[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    w[k] = mu0 * v0 * v0;
  }
}

}  // namespace

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  gauss_jacobi(n, 0.0, 0.0, x, w);
  for (int k = 0; k < n; ++k) {
    x[k] = 0.5 * (x[k] + 1.0);
    w[k] *= 0.5;
  }
}

QuadratureRule make_quadrature(QuadDomain domain, int degree) {
  if (degree < 1 || degree > 10) {
    throw ArgumentError("make_quadrature: degree must be in 1..10, got " +
                        std::to_string(degree));
  }
  QuadratureRule rule;
  rule.domain = domain;
  rule.degree = degree;
  const int n = (degree + 2) / 2;  // ceil((degree+1)/2)

  if (domain == QuadDomain::Edge) {
    std::vector<double> x, w;
    gauss_legendre_01(n, x, w);
    for (int i = 0; i < n; ++i) {
      rule.points.emplace_back(x[i], 0.0);
      rule.weights.push_back(w[i]);
    }
    return rule;
  }

  // Conical-product rule on the unit triangle:
  //   ∫_T f = ∫₀¹ ∫₀¹ f(u(1−v), v) (1−v) du dv,
  // handled by Gauss-Legendre in u and Gauss-Jacobi (weight 1−v) in v.
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre_01(n, xu, wu);
  gauss_jacobi(n, 1.0, 0.0, xv, wv);
  for (int j = 0; j < n; ++j) {
    // Map [−1,1] with weight (1−x) onto [0,1] with weight (1−v):
    // v = (1+x)/2, dv = dx/2, (1−v) = (1−x)/2 → scale weights by 1/4.
    xv[j] = 0.5 * (xv[j] + 1.0);
    wv[j] *= 0.25;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      rule.points.emplace_back(xu[i] * (1.0 - xv[j]), xv[j]);
      rule.weights.push_back(wu[i] * wv[j]);
    }
  }
  return rule;
}

QuadratureRule composite_rule(const QuadratureRule& base, int levels) {
  if (levels < 0) throw ArgumentError("composite_rule: levels must be >= 0");
  QuadratureRule rule = base;
  for (int l = 0; l < levels; ++l) {
    QuadratureRule next;
    next.domain = rule.domain;
    next.degree = rule.degree;
    if (rule.domain == QuadDomain::Edge) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.points[q].x();
        next.points.emplace_back(0.5 * t, 0.0);
        next.points.emplace_back(0.5 + 0.5 * t, 0.0);
        next.weights.push_back(0.5 * rule.weights[q]);
        next.weights.push_back(0.5 * rule.weights[q]);
      }
    } else {
      // Red split of the unit triangle into 4 congruent children, each an
      // affine image of the parent with |Jacobian| = 1/4.
      struct Child {
        Vec2 v0, e1, e2;
      };
      const Child children[4] = {
          {{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}},
          {{0.5, 0.0}, {0.5, 0.0}, {0.0, 0.5}},
          {{0.0, 0.5}, {0.5, 0.0}, {0.0, 0.5}},
          {{0.5, 0.5}, {-0.5, 0.0}, {0.0, -0.5}},
      };
      for (const Child& c : children) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const Vec2 p = rule.points[q];
          next.points.emplace_back(c.v0 + p.x() * c.e1 + p.y() * c.e2);
          next.weights.push_back(0.25 * rule.weights[q]);
        }
      }
    }
    rule = std::move(next);
  }
  return rule;
}

}  // namespace sdopt
