#ifndef SDOPT_TYPES_HPP
#define SDOPT_TYPES_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace sdopt {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Index = Eigen::Index;

/// Thrown when an argument violates an operation's precondition.
class ArgumentError : public std::invalid_argument {
public:
  explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Thrown when input geometry is inadmissible (degenerate or mismatched).
class GeometryError : public std::invalid_argument {
public:
  explicit GeometryError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Thrown when a numerical stage fails (singular factorization, bad residual).
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sdopt

#endif  // SDOPT_TYPES_HPP
