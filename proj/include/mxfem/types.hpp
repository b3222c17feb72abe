// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_TYPES_HPP
#define MXFEM_TYPES_HPP

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mxfem
{

using Complex = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

//
// Error categories. Every failure the library reports is one of these; callers
// (the CLI in particular) map them onto exit codes.
//

// Requested (family, degree) or quadrature order is not implemented.
class CapabilityError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or precondition violation.
class ArgumentError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Point outside the reference domain, or a field that cannot be evaluated.
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

// Malformed input text; carries the 1-based line number.
class ParseError : public std::runtime_error
{
public:
  ParseError(int line, const std::string &msg)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line)
  {
  }
  int line() const { return line_; }

private:
  int line_;
};

// Numerical breakdown (singular matrix, non-convergence, singular map).
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Singular linear system; pivot is the failing column (or -1 when unknown).
class SingularMatrixError : public NumericError
{
public:
  SingularMatrixError(const std::string &msg, long pivot)
    : NumericError(msg), pivot_(pivot)
  {
  }
  long pivot() const { return pivot_; }

private:
  long pivot_;
};

}  // namespace mxfem

#endif  // MXFEM_TYPES_HPP
