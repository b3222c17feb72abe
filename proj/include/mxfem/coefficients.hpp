// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_COEFFICIENTS_HPP
#define MXFEM_COEFFICIENTS_HPP

#include <functional>
#include <string>
#include <vector>

#include "mxfem/types.hpp"

namespace mxfem
{

using TensorFn = std::function<Mat3c(const Vec3 &)>;

// Matrix-valued coefficient field. Evaluation is pure and thread-safe.
struct CoefficientField
{
  TensorFn eval;
  // Evaluator returns exactly real symmetric matrices.
  bool real_symmetric = false;
  // Region tags the field is smooth on (empty: smooth everywhere).
  std::vector<int> regions;
  std::string description;

  Mat3c operator()(const Vec3 &x) const { return eval(x); }
};

CoefficientField constant_field(const Mat3c &value, const std::string &description = "constant");
CoefficientField identity_field();
CoefficientField scalar_field(std::function<double(const Vec3 &)> s,
                              const std::string &description);
// Pointwise inverse. Throws NumericError with the location if singular.
CoefficientField inverse_field(const CoefficientField &f);

//
// Radial PML scaling. With d = R+ - R- and s = (r - R-)/d, f is the cubic
//   f(r) = s^2 [(3 R+ - d) + (d - 2 R+) s]
// on [R-, R+], zero below R- and equal to r above R+; f_theta = f tan(theta).
//
struct PmlProfile
{
  double theta = 0.0;
  double r_minus = 1.0;
  double r_plus = 2.0;

  double f(double r) const;
  double fp(double r) const;
  double f_theta(double r) const;
  double fp_theta(double r) const;
  Complex alpha(double r) const;  // 1 + i f_theta'(r)
  Complex beta(double r) const;   // 1 + i f_theta(r)/r
};

// Throws ArgumentError unless 0 <= theta < pi/2 and 0 < r_minus < r_plus.
PmlProfile build_pml_profile(double theta, double r_minus, double r_plus);

// Spherical frame H with columns (radial, polar, azimuthal) unit vectors for
// polar angle `polar` and azimuth `azimuth`.
Mat3 spherical_frame(double polar, double azimuth);
// Frame at a point; on the polar axis the azimuth is atan2(0, 0) = 0.
Mat3 spherical_frame(const Vec3 &x);

// H diag(beta^2/alpha, alpha, alpha) H^T at radius r with the given frame.
Mat3c pml_tensor(const PmlProfile &profile, double r, const Mat3 &frame);

struct CoefficientPair
{
  Mat3c mu;
  Mat3c eps;
};

// mu and eps at x: the scatterer coefficients for r <= R-, the PML tensor
// (identical for both) beyond.
CoefficientPair eval_pml_tensors(const PmlProfile &profile, const CoefficientField &mu_scat,
                                 const CoefficientField &eps_scat, const Vec3 &x);

enum class BoundMode
{
  coercivity,   // min over samples of lambda_min(Re A)
  boundedness   // max over samples of ||A||_2
};

struct BoundReport
{
  double value = 0.0;
  Vec3 worst_point = Vec3::Zero();
};

// Samples a field; with `invert` the bound is taken for A(x)^{-1}. Re A is
// the Hermitian part of the entrywise real part, (Re A + Re A^T)/2.
BoundReport verify_coefficient_bounds(const CoefficientField &field,
                                      const std::vector<Vec3> &samples, BoundMode mode,
                                      bool invert = false);

// Coefficient data for a problem: mu^{-1}, eps and, for diagnostics, mu.
struct CoefficientSet
{
  std::string kind;
  CoefficientField mu;
  CoefficientField mu_inv;
  CoefficientField eps;
  bool has_pml = false;
  PmlProfile pml;
};

// Builtins: "identity", "pml", "pml_with_scatterer_bump". The bump adds a
// smooth compactly supported increase of eps inside r < R-/2.
CoefficientSet make_coefficients(const std::string &kind, const PmlProfile &pml = {});

}  // namespace mxfem

#endif  // MXFEM_COEFFICIENTS_HPP
