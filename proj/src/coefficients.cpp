// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mxfem
{

CoefficientField constant_field(const Mat3c &value, const std::string &description)
{
  CoefficientField f;
  f.eval = [value](const Vec3 &) { return value; };
  f.real_symmetric = value.imag().isZero(0.0) && value.real() == value.real().transpose();
  f.description = description;
  return f;
}

CoefficientField identity_field() { return constant_field(Mat3c::Identity(), "identity"); }

CoefficientField scalar_field(std::function<double(const Vec3 &)> s,
                              const std::string &description)
{
  CoefficientField f;
  f.eval = [s = std::move(s)](const Vec3 &x) -> Mat3c { return s(x) * Mat3c::Identity(); };
  f.real_symmetric = true;
  f.description = description;
  return f;
}

namespace
{

std::string where(const Vec3 &x)
{
  std::ostringstream os;
  os.precision(17);
  os << "(" << x(0) << ", " << x(1) << ", " << x(2) << ")";
  return os.str();
}

Mat3c checked_inverse(const Mat3c &a, const Vec3 &x)
{
  const Complex det = a.determinant();
  if (std::abs(det) <= 1e-300 || !std::isfinite(std::abs(det)))
  {
    throw NumericError("singular coefficient matrix at " + where(x));
  }
  return a.inverse();
}

}  // namespace

CoefficientField inverse_field(const CoefficientField &f)
{
  CoefficientField g;
  if (f.real_symmetric)
  {
    g.eval = [f](const Vec3 &x) -> Mat3c
    {
      const Mat3 inv = checked_inverse(f(x), x).real();
      return (0.5 * (inv + inv.transpose())).cast<Complex>();
    };
  }
  else
  {
    g.eval = [f](const Vec3 &x) { return checked_inverse(f(x), x); };
  }
  g.real_symmetric = f.real_symmetric;
  g.regions = f.regions;
  g.description = "inverse of " + f.description;
  return g;
}

double PmlProfile::f(double r) const
{
  if (r <= r_minus)
  {
    return 0.0;
  }
  if (r >= r_plus)
  {
    return r;
  }
  const double d = r_plus - r_minus;
  const double s = (r - r_minus) / d;
  return s * s * ((3.0 * r_plus - d) + (d - 2.0 * r_plus) * s);
}

double PmlProfile::fp(double r) const
{
  if (r <= r_minus)
  {
    return 0.0;
  }
  if (r >= r_plus)
  {
    return 1.0;
  }
  const double d = r_plus - r_minus;
  const double s = (r - r_minus) / d;
  return (2.0 * (3.0 * r_plus - d) * s + 3.0 * (d - 2.0 * r_plus) * s * s) / d;
}

double PmlProfile::f_theta(double r) const { return f(r) * std::tan(theta); }

double PmlProfile::fp_theta(double r) const { return fp(r) * std::tan(theta); }

Complex PmlProfile::alpha(double r) const { return {1.0, fp_theta(r)}; }

Complex PmlProfile::beta(double r) const { return {1.0, r > 0.0 ? f_theta(r) / r : 0.0}; }

PmlProfile build_pml_profile(double theta, double r_minus, double r_plus)
{
  if (!(theta >= 0.0 && theta < M_PI / 2.0))
  {
    throw ArgumentError("PML angle must satisfy 0 <= theta < pi/2");
  }
  if (!(r_minus > 0.0 && r_plus > r_minus))
  {
    throw ArgumentError("PML radii must satisfy 0 < r_minus < r_plus");
  }
  return PmlProfile{theta, r_minus, r_plus};
}

Mat3 spherical_frame(double polar, double azimuth)
{
  const double sp = std::sin(polar), cp = std::cos(polar);
  const double sa = std::sin(azimuth), ca = std::cos(azimuth);
  Mat3 H;
  H << sp * ca, cp * ca, -sa,
       sp * sa, cp * sa, ca,
       cp, -sp, 0.0;
  return H;
}

Mat3 spherical_frame(const Vec3 &x)
{
  const double r = x.norm();
  const double polar = std::acos(std::clamp(x(2) / r, -1.0, 1.0));
  return spherical_frame(polar, std::atan2(x(1), x(0)));
}

Mat3c pml_tensor(const PmlProfile &profile, double r, const Mat3 &frame)
{
  const Complex a = profile.alpha(r), b = profile.beta(r);
  const Eigen::Vector3cd d(b * b / a, a, a);
  const Eigen::Matrix3cd H = frame.cast<Complex>();
  return H * d.asDiagonal() * H.transpose();
}

CoefficientPair eval_pml_tensors(const PmlProfile &profile, const CoefficientField &mu_scat,
                                 const CoefficientField &eps_scat, const Vec3 &x)
{
  const double r = x.norm();
  if (r <= profile.r_minus)
  {
    return {mu_scat(x), eps_scat(x)};
  }
  const Mat3c t = pml_tensor(profile, r, spherical_frame(x));
  return {t, t};
}

BoundReport verify_coefficient_bounds(const CoefficientField &field,
                                      const std::vector<Vec3> &samples, BoundMode mode,
                                      bool invert)
{
  BoundReport rep;
  rep.value = mode == BoundMode::coercivity ? std::numeric_limits<double>::infinity() : 0.0;
  for (const Vec3 &x : samples)
  {
    Mat3c a = field(x);
    if (invert)
    {
      a = checked_inverse(a, x);
    }
    double v;
    if (mode == BoundMode::coercivity)
    {
      const Mat3 re = a.real();
      const Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (re + re.transpose()),
                                                   Eigen::EigenvaluesOnly);
      v = es.eigenvalues()(0);
      if (v < rep.value)
      {
        rep.value = v;
        rep.worst_point = x;
      }
    }
    else
    {
      const Eigen::JacobiSVD<Mat3c> svd(a);
      v = svd.singularValues()(0);
      if (v > rep.value)
      {
        rep.value = v;
        rep.worst_point = x;
      }
    }
  }
  return rep;
}

CoefficientSet make_coefficients(const std::string &kind, const PmlProfile &pml)
{
  CoefficientSet set;
  set.kind = kind;
  if (kind == "identity")
  {
    set.mu = identity_field();
    set.mu_inv = identity_field();
    set.eps = identity_field();
    return set;
  }
  if (kind != "pml" && kind != "pml_with_scatterer_bump")
  {
    throw ArgumentError("unknown coefficient kind '" + kind + "'");
  }
  const PmlProfile prof = build_pml_profile(pml.theta, pml.r_minus, pml.r_plus);
  set.has_pml = true;
  set.pml = prof;
  const CoefficientField mu_scat = identity_field();
  CoefficientField eps_scat = identity_field();
  if (kind == "pml_with_scatterer_bump")
  {
    const double rs = 0.5 * prof.r_minus;
    eps_scat = scalar_field(
        [rs](const Vec3 &x)
        {
          const double t = x.norm() / rs;
          return t < 1.0 ? 1.0 + 0.5 * std::exp(1.0 - 1.0 / (1.0 - t * t)) : 1.0;
        },
        "scatterer bump");
  }
  const CoefficientField mu_scat_inv = inverse_field(mu_scat);

  set.mu.eval = [prof, mu_scat, eps_scat](const Vec3 &x)
  { return eval_pml_tensors(prof, mu_scat, eps_scat, x).mu; };
  set.mu.description = kind + " mu";
  set.eps.eval = [prof, mu_scat, eps_scat](const Vec3 &x)
  { return eval_pml_tensors(prof, mu_scat, eps_scat, x).eps; };
  set.eps.description = kind + " eps";
  // mu^{-1} = H D^{-1} H^T in the layer since H is orthogonal.
  set.mu_inv.eval = [prof, mu_scat_inv](const Vec3 &x) -> Mat3c
  {
    const double r = x.norm();
    if (r <= prof.r_minus)
    {
      return mu_scat_inv(x);
    }
    const Complex a = prof.alpha(r), b = prof.beta(r);
    const Eigen::Vector3cd d(a / (b * b), 1.0 / a, 1.0 / a);
    const Eigen::Matrix3cd H = spherical_frame(x).cast<Complex>();
    return H * d.asDiagonal() * H.transpose();
  };
  set.mu_inv.description = kind + " mu^-1";
  return set;
}

}  // namespace mxfem
